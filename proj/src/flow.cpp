#include "homoflow/flow.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "homoflow/error.hpp"

namespace homoflow {

std::vector<double> SnapshotSequence::times() const {
  std::vector<double> t(snapshots.size(), 0.0);
  for (std::size_t k = 0; k < dts.size(); ++k) t[k + 1] = t[k] + dts[k];
  return t;
}

void SnapshotSequence::validate() const {
  if (snapshots.empty()) throw InvalidInput("SnapshotSequence: no snapshots");
  if (dts.size() + 1 != snapshots.size()) {
    throw InvalidInput("SnapshotSequence: expected one dt per step");
  }
  for (const auto& s : snapshots) {
    if (!(s.shape() == snapshots.front().shape())) {
      throw InvalidInput("SnapshotSequence: snapshots differ in shape");
    }
  }
  for (double dt : dts) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw InvalidInput("SnapshotSequence: dts must be positive and finite");
    }
  }
  if (uniform) {
    for (double dt : dts) {
      if (std::abs(dt - dts.front()) > 1e-12 * std::abs(dts.front())) {
        throw InvalidInput("SnapshotSequence: flagged uniform but dts differ");
      }
    }
  }
}

SnapshotSequence SnapshotSequence::make_uniform(
    std::vector<GridSignal> snapshots, double dt) {
  SnapshotSequence seq;
  const std::size_t n = snapshots.empty() ? 0 : snapshots.size() - 1;
  seq.snapshots = std::move(snapshots);
  seq.dts.assign(n, dt);
  seq.uniform = true;
  seq.validate();
  return seq;
}

void FlowParams::validate() const {
  if (!(p >= 1.0 && p < 2.0)) {
    throw DomainError("FlowParams: p must lie in [1, 2), got " +
                      std::to_string(p));
  }
  if (!(lambda <= 0.0)) {
    throw DomainError("FlowParams: lambda must be nonpositive");
  }
  if (!(f_norm_sq > 0.0)) throw DomainError("FlowParams: ||f||^2 must be > 0");
}

double decay_profile(double t, const FlowParams& params) {
  params.validate();
  if (t < 0.0) throw DomainError("decay_profile: t must be nonnegative");
  if (t == 0.0) return 1.0;
  const double base = 1.0 + (2.0 - params.p) * params.lambda * t;
  if (base <= 0.0) return 0.0;
  return std::pow(base, 1.0 / (2.0 - params.p));
}

double extinction_time(const FlowParams& params) {
  params.validate();
  if (params.lambda == 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / (params.lambda * (2.0 - params.p));
}

SnapshotSequence evolve_fixed(const GridSignal& f, const HomogeneousOperator& op,
                              double dt, std::size_t steps) {
  if (!(dt > 0.0)) throw InvalidInput("evolve_fixed: dt must be positive");
  SnapshotSequence seq;
  seq.uniform = true;
  seq.snapshots.reserve(steps + 1);
  seq.snapshots.push_back(f);
  for (std::size_t k = 0; k < steps; ++k) {
    const GridSignal& psi = seq.snapshots.back();
    const GridSignal p_psi = op(psi);
    Eigen::VectorXd next = psi.values() + dt * p_psi.values();
    if (!next.allFinite()) {
      throw DivergenceError(k + 1, "evolve_fixed: non-finite state at step " +
                                       std::to_string(k + 1));
    }
    seq.snapshots.push_back(psi.with_values(std::move(next)));
    seq.dts.push_back(dt);
  }
  return seq;
}

SnapshotSequence evolve_fixed(const GridSignal& f, const OperatorConfig& cfg,
                              double dt, std::size_t steps) {
  return evolve_fixed(f, p_laplacian_operator(cfg), dt, steps);
}

SnapshotSequence evolve_adaptive(const GridSignal& f,
                                 const HomogeneousOperator& op, double delta,
                                 std::size_t steps) {
  if (!(delta > 0.0 && delta < 2.0)) {
    throw InvalidInput("evolve_adaptive: delta must lie in (0, 2)");
  }
  SnapshotSequence seq;
  seq.snapshots.reserve(steps + 1);
  seq.snapshots.push_back(f);
  for (std::size_t k = 0; k < steps; ++k) {
    const GridSignal& psi = seq.snapshots.back();
    const GridSignal p_psi = op(psi);
    const double pp = squared_norm(p_psi);
    if (pp == 0.0) {
      seq.stopped_early = true;
      break;
    }
    const double dt = -inner(p_psi, psi) / pp * delta;
    if (!(dt > 0.0)) {
      // <P(psi), psi> >= 0 cannot happen for a monotone operator unless the
      // state is numerically stationary.
      seq.stopped_early = true;
      break;
    }
    Eigen::VectorXd next = psi.values() + dt * p_psi.values();
    if (!next.allFinite()) {
      throw DivergenceError(k + 1, "evolve_adaptive: non-finite state at step " +
                                       std::to_string(k + 1));
    }
    seq.snapshots.push_back(psi.with_values(std::move(next)));
    seq.dts.push_back(dt);
  }
  return seq;
}

SnapshotSequence evolve_adaptive(const GridSignal& f, const OperatorConfig& cfg,
                                 double delta, std::size_t steps) {
  return evolve_adaptive(f, p_laplacian_operator(cfg), delta, steps);
}

std::vector<double> adaptive_sample_times(const FlowParams& params,
                                          double delta, std::size_t steps) {
  params.validate();
  if (!(delta > 0.0 && delta < 2.0)) {
    throw InvalidInput("adaptive_sample_times: delta must lie in (0, 2)");
  }
  if (params.lambda == 0.0) {
    throw DomainError("adaptive_sample_times: lambda = 0 never decays");
  }
  const double q = std::pow(std::abs(1.0 - delta), 2.0 - params.p);
  const double scale = 1.0 / (params.lambda * (2.0 - params.p));
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    t[k] = (std::pow(q, static_cast<double>(k)) - 1.0) * scale;
  }
  return t;
}

SnapshotSequence synth_eigenflow(const GridSignal& f, const FlowParams& params,
                                 const Sampling& sampling) {
  params.validate();
  SnapshotSequence seq;
  if (const auto* u = std::get_if<UniformSampling>(&sampling)) {
    if (!(u->dt > 0.0)) throw InvalidInput("synth_eigenflow: dt must be > 0");
    std::vector<GridSignal> snaps;
    snaps.reserve(u->steps + 1);
    for (std::size_t k = 0; k <= u->steps; ++k) {
      const double a = decay_profile(static_cast<double>(k) * u->dt, params);
      snaps.push_back(f.with_values(a * f.values()));
    }
    return SnapshotSequence::make_uniform(std::move(snaps), u->dt);
  }

  const auto& ad = std::get<AdaptiveSampling>(sampling);
  const std::vector<double> t = adaptive_sample_times(params, ad.delta, ad.steps);
  const double ratio = std::abs(1.0 - ad.delta);
  seq.snapshots.reserve(ad.steps + 1);
  for (std::size_t k = 0; k <= ad.steps; ++k) {
    const double a = std::pow(ratio, static_cast<double>(k));
    seq.snapshots.push_back(f.with_values(a * f.values()));
    if (k > 0) seq.dts.push_back(t[k] - t[k - 1]);
  }
  seq.uniform = false;
  return seq;
}

}  // namespace homoflow
