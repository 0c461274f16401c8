#include "homoflow/analytic.hpp"

#include <cmath>

#include "homoflow/dmd.hpp"
#include "homoflow/error.hpp"

namespace homoflow {

Rank1Dmd analytic_dmd_rank1(const std::vector<double>& a, double f_norm) {
  if (a.size() < 2) throw InvalidInput("analytic_dmd_rank1: need N >= 1");
  if (a.front() != 1.0) throw InvalidInput("analytic_dmd_rank1: a_0 must be 1");
  if (!(f_norm > 0.0)) throw InvalidInput("analytic_dmd_rank1: ||f|| <= 0");
  double cross = 0.0;
  double prev_sq = 0.0;
  double next_sq = 0.0;
  for (std::size_t k = 1; k < a.size(); ++k) {
    cross += a[k] * a[k - 1];
    prev_sq += a[k - 1] * a[k - 1];
    next_sq += a[k] * a[k];
  }
  const double f_sq = f_norm * f_norm;
  return {cross / prev_sq, 1.0 / f_norm, f_norm,
          f_sq * (next_sq - cross * cross / prev_sq)};
}

double limit_mu_tilde(double lambda, double p) {
  if (!(p >= 1.0 && p <= 2.0)) {
    throw DomainError("limit_mu_tilde: p must lie in [1, 2]");
  }
  return lambda * (4.0 - p) / 2.0;
}

double paradox_bound(double f_norm_sq, double lambda, double p) {
  if (!(lambda < 0.0)) throw DomainError("paradox_bound: lambda must be < 0");
  if (!(p >= 1.0 && p < 2.0)) {
    throw DomainError("paradox_bound: p must lie in [1, 2)");
  }
  if (!(f_norm_sq > 0.0)) throw DomainError("paradox_bound: ||f||^2 <= 0");
  const double gap = 1.0 - std::sqrt(-std::expm1(-(4.0 - p) / (2.0 - p)));
  return -f_norm_sq / (lambda * (4.0 - p)) * gap * gap;
}

double err_rec_continuous(const FlowParams& params, double mu_tilde,
                          std::size_t nodes) {
  params.validate();
  if (nodes < 1000) {
    throw InvalidInput("err_rec_continuous: need at least 1000 nodes");
  }
  if (!(params.lambda < 0.0)) {
    throw DomainError("err_rec_continuous: lambda must be < 0 (finite "
                      "extinction time)");
  }
  const double T = extinction_time(params);
  const double h = T / static_cast<double>(nodes - 1);
  auto integrand = [&](double t) {
    const double diff = decay_profile(t, params) - std::exp(mu_tilde * t);
    return diff * diff;
  };
  double sum = 0.5 * (integrand(0.0) + integrand(T));
  for (std::size_t i = 1; i + 1 < nodes; ++i) {
    sum += integrand(static_cast<double>(i) * h);
  }
  return params.f_norm_sq * sum * h;
}

std::vector<ParadoxRow> paradox_sweep(const FlowParams& params,
                                      std::size_t levels,
                                      std::size_t base_divisions,
                                      std::size_t nodes) {
  params.validate();
  if (!(params.lambda < 0.0)) {
    throw DomainError("paradox_sweep: lambda must be < 0");
  }
  if (levels < 1 || base_divisions < 2) {
    throw InvalidInput("paradox_sweep: need levels >= 1 and base_divisions >= 2");
  }
  const double T = extinction_time(params);
  const double bound = paradox_bound(params.f_norm_sq, params.lambda, params.p);
  const GridSignal f = GridSignal::line(
      Eigen::VectorXd::Constant(1, std::sqrt(params.f_norm_sq)));
  std::vector<ParadoxRow> rows;
  rows.reserve(levels);
  for (std::size_t level = 0; level < levels; ++level) {
    const std::size_t steps = base_divisions << level;
    const double dt = T / static_cast<double>(steps);
    const SnapshotSequence seq =
        synth_eigenflow(f, params, UniformSampling{dt, steps});
    const DmdResult res = dmd(seq, FixedRank{1});
    const double mu = res.mu[0].real();
    const double mu_tilde = std::log(mu) / dt;
    rows.push_back({dt, err_dmd(res, build_pair(seq)),
                    err_rec_continuous(params, mu_tilde, nodes), bound,
                    mu_tilde});
  }
  return rows;
}

}  // namespace homoflow
