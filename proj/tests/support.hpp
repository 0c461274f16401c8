#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>

#include "homoflow/grid_signal.hpp"

namespace testing {

using homoflow::GridSignal;
using homoflow::Index;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double normal(double sigma = 1.0) {
    return std::normal_distribution<double>(0.0, sigma)(rng_);
  }
  Index index(Index lo, Index hi) {
    return std::uniform_int_distribution<Index>(lo, hi)(rng_);
  }

  Eigen::VectorXd vector(Index n, double lo = -1.0, double hi = 1.0) {
    Eigen::VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }
  Eigen::MatrixXd matrix(Index rows, Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j) m.col(j) = vector(rows);
    return m;
  }

  GridSignal line(Index n, double spacing = 1.0) {
    return GridSignal::line(vector(n), spacing);
  }
  GridSignal image(Index rows, Index cols, double spacing = 1.0) {
    return GridSignal::image(rows, cols, vector(rows * cols), spacing);
  }
  /// Random signal of random dimension and size.
  GridSignal signal() {
    if (uniform(0.0, 1.0) < 0.5) return line(index(4, 40), uniform(0.2, 2.0));
    return image(index(3, 10), index(3, 10), uniform(0.2, 2.0));
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Image of a disk of the given radius (in pixels) centered in the grid.
inline Eigen::VectorXd disk(Index n, double radius) {
  Eigen::VectorXd v(n * n);
  const double c = 0.5 * static_cast<double>(n - 1);
  for (Index r = 0; r < n; ++r) {
    for (Index q = 0; q < n; ++q) {
      const double d = std::hypot(static_cast<double>(r) - c, static_cast<double>(q) - c);
      v[r * n + q] = d <= radius ? 1.0 : 0.0;
    }
  }
  return v;
}

}  // namespace testing
