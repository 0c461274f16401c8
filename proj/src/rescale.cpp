#include "homoflow/rescale.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "homoflow/error.hpp"

namespace homoflow {
namespace {

// Interpolation weights closer than this to a grid node snap onto it, so that
// samples coinciding with the source grid reproduce the snapshot bit-exactly.
constexpr double kSnap = 1e-12;

struct Bracket {
  std::size_t lo;
  double w;  // weight of lo + 1
};

std::vector<Bracket> uniform_brackets(const TimeGrid& grid,
                                      std::size_t samples) {
  grid.validate();
  if (samples < 2) throw InvalidInput("resample: need at least 2 samples");
  if (grid.size() < 2) throw InvalidInput("resample: grid has a single point");
  const auto& t = grid.times;
  const std::size_t last = t.size() - 1;
  const double step = t.back() / static_cast<double>(samples - 1);
  std::vector<Bracket> out(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    if (j == 0) {
      out[j] = {0, 0.0};
      continue;
    }
    if (j + 1 == samples) {
      out[j] = {last - 1, 1.0};
      continue;
    }
    const double tau = static_cast<double>(j) * step;
    auto it = std::upper_bound(t.begin(), t.end(), tau);
    std::size_t lo = static_cast<std::size_t>(it - t.begin());
    lo = lo == 0 ? 0 : lo - 1;
    lo = std::min(lo, last - 1);
    double w = (tau - t[lo]) / (t[lo + 1] - t[lo]);
    if (std::abs(w) <= kSnap) w = 0.0;
    if (std::abs(1.0 - w) <= kSnap) w = 1.0;
    out[j] = {lo, std::clamp(w, 0.0, 1.0)};
  }
  return out;
}

// Returns false when the grid must stop at step k.
bool push_step(TimeGrid& grid, double step, std::size_t k,
               NonDissipativePolicy policy, const char* where) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    if (policy == NonDissipativePolicy::kClamp && grid.size() >= 2) {
      const std::size_t n = grid.size();
      step = grid.times[n - 1] - grid.times[n - 2];
    } else {
      throw NonDissipativeError(
          k, std::string(where) + ": non-dissipative step at index " +
                 std::to_string(k));
    }
  }
  grid.times.push_back(grid.times.back() + step);
  return true;
}

}  // namespace

void TimeGrid::validate() const {
  if (times.empty() || times.front() != 0.0) {
    throw InvalidInput("TimeGrid: must start at 0");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) {
      throw InvalidInput("TimeGrid: times must be strictly increasing");
    }
  }
}

TimeGrid rescale_known(const SnapshotSequence& seq,
                       const HomogeneousOperator& op,
                       NonDissipativePolicy policy) {
  seq.validate();
  TimeGrid grid;
  grid.times.push_back(0.0);
  for (std::size_t k = 0; k < seq.steps(); ++k) {
    const GridSignal& psi = seq.snapshots[k];
    const GridSignal p_psi = op(psi);
    const double pp = squared_norm(p_psi);
    if (pp == 0.0) {
      grid.truncated = true;
      break;
    }
    const double step = -pp / inner(p_psi, psi) * seq.dts[k];
    push_step(grid, step, k, policy, "rescale_known");
  }
  return grid;
}

TimeGrid rescale_known(const SnapshotSequence& seq, const OperatorConfig& cfg,
                       NonDissipativePolicy policy) {
  return rescale_known(seq, p_laplacian_operator(cfg), policy);
}

TimeGrid rescale_blind(const SnapshotSequence& seq,
                       NonDissipativePolicy policy) {
  seq.validate();
  TimeGrid grid;
  grid.times.push_back(0.0);
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
    const Eigen::VectorXd& cur = seq.snapshots[k].values();
    const Eigen::VectorXd diff = seq.snapshots[k + 1].values() - cur;
    const double dd = diff.squaredNorm();
    if (dd == 0.0) {
      grid.truncated = true;
      break;
    }
    const double step = -dd / diff.dot(cur);
    push_step(grid, step, k, policy, "rescale_blind");
  }
  return grid;
}

SnapshotSequence resample_uniform(const SnapshotSequence& seq,
                                  const TimeGrid& grid, std::size_t samples) {
  seq.validate();
  if (grid.size() > seq.size()) {
    throw InvalidInput("resample_uniform: grid longer than the sequence");
  }
  const auto brackets = uniform_brackets(grid, samples);
  std::vector<GridSignal> out;
  out.reserve(samples);
  for (const Bracket& b : brackets) {
    const GridSignal& lo = seq.snapshots[b.lo];
    if (b.w == 0.0) {
      out.push_back(lo);
    } else if (b.w == 1.0) {
      out.push_back(seq.snapshots[b.lo + 1]);
    } else {
      const GridSignal& hi = seq.snapshots[b.lo + 1];
      out.push_back(lo.with_values((1.0 - b.w) * lo.values() +
                                   b.w * hi.values()));
    }
  }
  return SnapshotSequence::make_uniform(
      std::move(out), grid.back() / static_cast<double>(samples - 1));
}

std::vector<double> resample_values(const TimeGrid& grid,
                                    const std::vector<double>& values,
                                    std::size_t samples) {
  if (values.size() < grid.size()) {
    throw InvalidInput("resample_values: fewer values than grid points");
  }
  const auto brackets = uniform_brackets(grid, samples);
  std::vector<double> out;
  out.reserve(samples);
  for (const Bracket& b : brackets) {
    out.push_back((1.0 - b.w) * values[b.lo] + b.w * values[b.lo + 1]);
  }
  return out;
}

}  // namespace homoflow
