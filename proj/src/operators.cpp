#include "homoflow/operators.hpp"

#include <cmath>
#include <string>

#include "homoflow/error.hpp"

namespace homoflow {
namespace {

// Flux weight |g|_eps^{p-2}; zero when the regularized magnitude vanishes.
double flux_weight(double mag2, const OperatorConfig& cfg) {
  const double reg = mag2 + cfg.eps * cfg.eps;
  if (reg == 0.0) return 0.0;
  if (cfg.p == 2.0) return 1.0;
  return std::pow(reg, 0.5 * (cfg.p - 2.0));
}

void require_finite(const GridSignal& psi, const char* where) {
  if (!psi.values().allFinite()) {
    throw InvalidInput(std::string(where) + ": non-finite input");
  }
}

}  // namespace

void OperatorConfig::validate() const {
  if (!(p >= 1.0 && p <= 2.0)) {
    throw InvalidInput("OperatorConfig: p must lie in [1, 2], got " +
                       std::to_string(p));
  }
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw InvalidInput("OperatorConfig: eps must be finite and nonnegative");
  }
}

double p_dirichlet_energy(const GridSignal& psi, const OperatorConfig& cfg) {
  cfg.validate();
  require_finite(psi, "p_dirichlet_energy");
  const Index rows = psi.shape().rows;
  const Index cols = psi.shape().cols;
  const double h = psi.spacing();
  const auto& v = psi.values();
  const double eps_p = cfg.eps > 0.0 ? std::pow(cfg.eps, cfg.p) : 0.0;

  double sum = 0.0;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const Index c = i * cols + j;
      const double gx = j + 1 < cols ? (v[c + 1] - v[c]) / h : 0.0;
      const double gy = i + 1 < rows ? (v[c + cols] - v[c]) / h : 0.0;
      const double reg = gx * gx + gy * gy + cfg.eps * cfg.eps;
      if (reg == 0.0) continue;
      sum += std::pow(reg, 0.5 * cfg.p) - eps_p;
    }
  }
  return sum * std::pow(h, psi.dims()) / cfg.p;
}

GridSignal p_laplacian(const GridSignal& psi, const OperatorConfig& cfg) {
  cfg.validate();
  require_finite(psi, "p_laplacian");
  const Index rows = psi.shape().rows;
  const Index cols = psi.shape().cols;
  const double h = psi.spacing();
  const auto& v = psi.values();

  Eigen::VectorXd fx(v.size());
  Eigen::VectorXd fy(v.size());
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const Index c = i * cols + j;
      const double gx = j + 1 < cols ? (v[c + 1] - v[c]) / h : 0.0;
      const double gy = i + 1 < rows ? (v[c + cols] - v[c]) / h : 0.0;
      const double w = flux_weight(gx * gx + gy * gy, cfg);
      fx[c] = w * gx;
      fy[c] = w * gy;
    }
  }

  Eigen::VectorXd out(v.size());
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const Index c = i * cols + j;
      const double west = j > 0 ? fx[c - 1] : 0.0;
      const double north = i > 0 ? fy[c - cols] : 0.0;
      out[c] = (fx[c] - west + fy[c] - north) / h;
    }
  }
  return psi.with_values(std::move(out));
}

double rayleigh_step_factor(const GridSignal& p_psi, const GridSignal& psi) {
  const double denom = squared_norm(p_psi);
  if (denom == 0.0) {
    throw SteadyStateError("rayleigh_step_factor: P(psi) = 0 (steady state)");
  }
  return -inner(p_psi, psi) / denom;
}

HomogeneousOperator p_laplacian_operator(const OperatorConfig& cfg) {
  cfg.validate();
  return {cfg.p, [cfg](const GridSignal& psi) { return p_laplacian(psi, cfg); }};
}

HomogeneousOperator norm_power_operator(double lambda, double p,
                                        double f_norm) {
  if (!(lambda <= 0.0)) throw DomainError("norm_power_operator: lambda > 0");
  if (!(p >= 1.0 && p <= 2.0)) {
    throw DomainError("norm_power_operator: p outside [1, 2]");
  }
  if (!(f_norm > 0.0)) throw InvalidInput("norm_power_operator: f_norm <= 0");
  return {p, [=](const GridSignal& psi) {
            const double n = norm(psi);
            if (n == 0.0) return GridSignal::zeros_like(psi);
            const double scale = lambda * std::pow(n / f_norm, p - 2.0);
            return psi.with_values(scale * psi.values());
          }};
}

}  // namespace homoflow
