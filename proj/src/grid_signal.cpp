#include "homoflow/grid_signal.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "homoflow/error.hpp"

namespace homoflow {

std::vector<Index> GridShape::extents() const {
  if (dims == 1) return {cols};
  return {rows, cols};
}

GridSignal::GridSignal(GridShape shape, Eigen::VectorXd values, double spacing)
    : shape_(shape), values_(std::move(values)), spacing_(spacing) {
  if (shape_.dims != 1 && shape_.dims != 2) {
    throw InvalidInput("GridSignal: dims must be 1 or 2");
  }
  if (shape_.dims == 1 && shape_.rows != 1) {
    throw InvalidInput("GridSignal: 1D signals have exactly one row");
  }
  if (shape_.rows < 1 || shape_.cols < 1) {
    throw InvalidInput("GridSignal: empty grid");
  }
  if (shape_.size() != values_.size()) {
    throw InvalidInput("GridSignal: value count " +
                       std::to_string(values_.size()) +
                       " does not match shape " +
                       std::to_string(shape_.size()));
  }
  if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) {
    throw InvalidInput("GridSignal: spacing must be positive and finite");
  }
  if (!values_.allFinite()) {
    throw InvalidInput("GridSignal: non-finite value");
  }
}

GridSignal GridSignal::line(Eigen::VectorXd values, double spacing) {
  const Index m = values.size();
  return GridSignal(GridShape::line(m), std::move(values), spacing);
}

GridSignal GridSignal::image(Index rows, Index cols, Eigen::VectorXd values,
                             double spacing) {
  return GridSignal(GridShape::image(rows, cols), std::move(values), spacing);
}

GridSignal GridSignal::zeros_like(const GridSignal& other) {
  return other.with_values(Eigen::VectorXd::Zero(other.size()));
}

GridSignal GridSignal::with_values(Eigen::VectorXd values) const {
  return GridSignal(shape_, std::move(values), spacing_);
}

void require_same_shape(const GridSignal& a, const GridSignal& b,
                        const char* where) {
  if (!(a.shape() == b.shape())) {
    throw InvalidInput(std::string(where) + ": shape mismatch");
  }
}

double inner(const GridSignal& a, const GridSignal& b) {
  require_same_shape(a, b, "inner");
  return a.values().dot(b.values());
}

double norm(const GridSignal& a) { return a.values().norm(); }

double squared_norm(const GridSignal& a) { return a.values().squaredNorm(); }

}  // namespace homoflow
