#pragma once

#include <Eigen/Core>

#include <vector>

namespace homoflow {

using Index = Eigen::Index;

/// Extent of a uniform grid. A 1D signal of length M is stored as a single
/// row (rows = 1, cols = M, dims = 1); images are row-major.
struct GridShape {
  Index rows = 1;
  Index cols = 0;
  int dims = 1;

  Index size() const { return rows * cols; }
  bool operator==(const GridShape&) const = default;

  static GridShape line(Index length) { return {1, length, 1}; }
  static GridShape image(Index rows, Index cols) { return {rows, cols, 2}; }

  /// [M] for 1D, [rows, cols] for 2D.
  std::vector<Index> extents() const;
};

/// Real field on a uniform grid with spacing h. Values are finite, spacing is
/// positive, and the shape never changes once constructed.
class GridSignal {
 public:
  GridSignal() = default;
  GridSignal(GridShape shape, Eigen::VectorXd values, double spacing = 1.0);

  static GridSignal line(Eigen::VectorXd values, double spacing = 1.0);
  static GridSignal image(Index rows, Index cols, Eigen::VectorXd values,
                          double spacing = 1.0);
  static GridSignal zeros_like(const GridSignal& other);

  const GridShape& shape() const { return shape_; }
  double spacing() const { return spacing_; }
  Index size() const { return values_.size(); }
  int dims() const { return shape_.dims; }
  const Eigen::VectorXd& values() const { return values_; }

  /// Same shape and spacing, new values (validated).
  GridSignal with_values(Eigen::VectorXd values) const;

  double operator()(Index row, Index col) const {
    return values_[row * shape_.cols + col];
  }

 private:
  GridShape shape_;
  Eigen::VectorXd values_;
  double spacing_ = 1.0;
};

/// Unweighted Euclidean inner product over grid values.
double inner(const GridSignal& a, const GridSignal& b);
double norm(const GridSignal& a);
double squared_norm(const GridSignal& a);

void require_same_shape(const GridSignal& a, const GridSignal& b,
                        const char* where);

}  // namespace homoflow
