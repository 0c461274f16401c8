#pragma once

#include <cstddef>
#include <vector>

#include "homoflow/flow.hpp"
#include "homoflow/operators.hpp"

namespace homoflow {

/// Rescaled times t~_0 = 0 < t~_1 < ... covering the first times.size()
/// snapshots of the source sequence. `truncated` is set when the source hit a
/// steady state before its last snapshot.
struct TimeGrid {
  std::vector<double> times;
  bool truncated = false;

  std::size_t size() const { return times.size(); }
  double back() const { return times.back(); }
  void validate() const;
};

/// What to do with a step whose increment is not dissipative.
enum class NonDissipativePolicy {
  kError,  // throw NonDissipativeError
  kClamp,  // reuse the previous rescaled step
};

/// dt~_k = -(||P(psi_k)||^2 / <P(psi_k), psi_k>) dt_k.
TimeGrid rescale_known(const SnapshotSequence& seq,
                       const HomogeneousOperator& op,
                       NonDissipativePolicy policy = NonDissipativePolicy::kError);
TimeGrid rescale_known(const SnapshotSequence& seq, const OperatorConfig& cfg,
                       NonDissipativePolicy policy = NonDissipativePolicy::kError);

/// dt~_k = -||psi_{k+1} - psi_k||^2 / <psi_{k+1} - psi_k, psi_k>.
/// Needs neither the operator nor the original steps.
TimeGrid rescale_blind(const SnapshotSequence& seq,
                       NonDissipativePolicy policy = NonDissipativePolicy::kError);

/// Linear interpolation of the first grid.size() snapshots at the equispaced
/// times j * t~_last / (samples - 1). Endpoints are reproduced exactly and the
/// result is flagged uniform with dt = t~_last / (samples - 1).
SnapshotSequence resample_uniform(const SnapshotSequence& seq,
                                  const TimeGrid& grid, std::size_t samples);

/// Interpolates per-snapshot scalars (e.g. the original sample times) onto the
/// same equispaced grid used by resample_uniform.
std::vector<double> resample_values(const TimeGrid& grid,
                                    const std::vector<double>& values,
                                    std::size_t samples);

}  // namespace homoflow
