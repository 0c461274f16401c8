#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "homoflow/grid_signal.hpp"
#include "homoflow/operators.hpp"

namespace homoflow {

/// Ordered snapshots psi_0..psi_N with the step dt_k between psi_k and
/// psi_{k+1}. `stopped_early` marks a flow that reached a steady state
/// before the requested number of steps.
struct SnapshotSequence {
  std::vector<GridSignal> snapshots;
  std::vector<double> dts;
  bool uniform = false;
  bool stopped_early = false;

  std::size_t size() const { return snapshots.size(); }
  /// Number of steps N (= size() - 1).
  std::size_t steps() const { return dts.size(); }
  const GridShape& shape() const { return snapshots.front().shape(); }

  /// Cumulative times t_0 = 0, t_k = sum_{i<k} dt_i.
  std::vector<double> times() const;

  /// Throws InvalidInput when the invariants do not hold.
  void validate() const;

  static SnapshotSequence make_uniform(std::vector<GridSignal> snapshots,
                                       double dt);
};

/// Eigenvalue data of a separable flow psi(t) = a(t) f with P(f) = lambda f.
struct FlowParams {
  double lambda = -1.0;
  double p = 1.5;
  double f_norm_sq = 1.0;

  void validate() const;
};

/// a(t) = [(1 + (2-p) lambda t)^+]^{1/(2-p)}.
double decay_profile(double t, const FlowParams& params);

/// T = -1 / (lambda (2-p)); +infinity for lambda = 0.
double extinction_time(const FlowParams& params);

/// psi_{k+1} = psi_k + P(psi_k) dt. Throws DivergenceError on non-finite state.
SnapshotSequence evolve_fixed(const GridSignal& f, const HomogeneousOperator& op,
                              double dt, std::size_t steps);
SnapshotSequence evolve_fixed(const GridSignal& f, const OperatorConfig& cfg,
                              double dt, std::size_t steps);

/// Explicit scheme with dt_k = -<P(psi_k), psi_k> / ||P(psi_k)||^2 * delta.
/// When P(psi_k) = 0 the run stops and the prefix is returned with
/// `stopped_early` set.
SnapshotSequence evolve_adaptive(const GridSignal& f,
                                 const HomogeneousOperator& op, double delta,
                                 std::size_t steps);
SnapshotSequence evolve_adaptive(const GridSignal& f, const OperatorConfig& cfg,
                                 double delta, std::size_t steps);

struct UniformSampling {
  double dt;
  std::size_t steps;
};

struct AdaptiveSampling {
  double delta;
  std::size_t steps;
};

using Sampling = std::variant<UniformSampling, AdaptiveSampling>;

/// Exact samples of the separable solution a(t) f.
///   uniform:  psi_k = a(k dt) f, all dts equal to dt.
///   adaptive: psi_k = |1-delta|^k f at
///             t_k = (|1-delta|^{k(2-p)} - 1) / (lambda (2-p)).
SnapshotSequence synth_eigenflow(const GridSignal& f, const FlowParams& params,
                                 const Sampling& sampling);

/// Sample times of the adaptive separable sampling, t_0..t_N.
std::vector<double> adaptive_sample_times(const FlowParams& params,
                                          double delta, std::size_t steps);

}  // namespace homoflow
