#include "homoflow/orthons.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "homoflow/error.hpp"

namespace homoflow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

OrthoNsDecomposition empty_decomposition(const GridSignal& f, double p,
                                         double delta, bool with_mode) {
  OrthoNsDecomposition dec;
  dec.shape = f.shape();
  dec.spacing = f.spacing();
  dec.p = p;
  dec.delta = delta;
  dec.method = with_mode ? EigenvalueMethod::kFromMode : EigenvalueMethod::kFromMu;
  dec.modes.resize(f.size(), 0);
  if (with_mode) {
    dec.lambdas_mode = Eigen::VectorXd();
    dec.mode_residuals = Eigen::VectorXd();
  }
  dec.warnings.push_back("input reached a steady state before two snapshots; "
                         "decomposition is empty");
  return dec;
}

void check_p(double p, const char* where) {
  if (!(p >= 1.0 && p < 2.0)) {
    throw DomainError(std::string(where) + ": p must lie in [1, 2)");
  }
}

}  // namespace

GridSignal OrthoNsDecomposition::mode(Index i) const {
  if (i < 0 || i >= rank()) throw InvalidInput("mode: index out of range");
  return GridSignal(shape, modes.col(i), spacing);
}

GridSignal OrthoNsDecomposition::projection() const {
  return GridSignal(shape, modes * alphas, spacing);
}

double lambda_from_mode(const GridSignal& phi, double mu, double delta,
                        const HomogeneousOperator& op) {
  if (!(delta > 0.0)) throw InvalidInput("lambda_from_mode: delta must be > 0");
  const GridSignal p_phi = op(phi);
  const double pp = squared_norm(p_phi);
  const double ip = inner(p_phi, phi);
  if (pp == 0.0 || ip == 0.0) {
    throw UndefinedEigenvalue(
        "lambda_from_mode: P(phi) vanishes or is orthogonal to phi");
  }
  return (1.0 - mu) / delta * pp / ip;
}

double lambda_from_mode(const GridSignal& phi, double mu, double delta,
                        const OperatorConfig& cfg) {
  return lambda_from_mode(phi, mu, delta, p_laplacian_operator(cfg));
}

double lambda_from_mu(double mu, const std::vector<double>& times, double p) {
  check_p(p, "lambda_from_mu");
  if (!(mu > 0.0)) throw DomainError("lambda_from_mu: mu must be > 0");
  if (times.size() < 2) {
    throw InvalidInput("lambda_from_mu: need at least two time points");
  }
  const double e = 2.0 - p;
  const double log_mu = std::log(mu);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    num += (std::exp(static_cast<double>(k) * e * log_mu) - 1.0) * t;
    den += t * t;
  }
  if (den == 0.0) {
    throw UndefinedEigenvalue("lambda_from_mu: all sample times are zero");
  }
  return num / (e * den);
}

OrthoNsDecomposition orthons_normalized(const SnapshotSequence& seq,
                                        double delta,
                                        const std::vector<double>& times,
                                        double p,
                                        const HomogeneousOperator* op,
                                        const OrthoNsOptions& opts) {
  seq.validate();
  check_p(p, "orthons");
  if (!(delta > 0.0)) throw InvalidInput("orthons: delta must be > 0");
  if (times.size() != seq.size()) {
    throw InvalidInput("orthons: need one time per snapshot");
  }
  EigenvalueMethod method = opts.method;
  if (method == EigenvalueMethod::kAuto) {
    method = op != nullptr ? EigenvalueMethod::kFromMode : EigenvalueMethod::kFromMu;
  }
  if (method == EigenvalueMethod::kFromMode && op == nullptr) {
    throw ContractError("orthons: the mode-based eigenvalue needs an operator");
  }
  if (seq.size() < 2) {
    OrthoNsDecomposition dec = empty_decomposition(seq.snapshots.front(), p,
                                                   delta, op != nullptr);
    dec.method = method;
    return dec;
  }

  SnapshotSequence uniform = SnapshotSequence::make_uniform(seq.snapshots, delta);
  const DmdResult res = sdmd(uniform, opts.rank);

  OrthoNsDecomposition dec;
  dec.shape = seq.shape();
  dec.spacing = seq.snapshots.front().spacing();
  dec.p = p;
  dec.delta = delta;
  dec.method = method;
  dec.warnings = res.warnings;

  const Index r = res.rank;
  dec.modes = res.modes.real();
  dec.alphas = res.alpha.real();
  dec.mus = res.mu.real();
  dec.lambdas_mu = Eigen::VectorXd::Constant(r, kNaN);
  dec.lambdas = Eigen::VectorXd::Constant(r, -kInf);
  dec.ext_times = Eigen::VectorXd::Zero(r);
  dec.physical.assign(static_cast<std::size_t>(r), false);
  if (op != nullptr) {
    dec.lambdas_mode = Eigen::VectorXd::Constant(r, kNaN);
    dec.mode_residuals = Eigen::VectorXd::Constant(r, kNaN);
  }

  for (Index i = 0; i < r; ++i) {
    const double mu = dec.mus[i];
    if (mu > 0.0) dec.lambdas_mu[i] = lambda_from_mu(mu, times, p);
    if (op != nullptr && dec.alphas[i] > 0.0) {
      const GridSignal scaled(dec.shape, dec.alphas[i] * dec.modes.col(i),
                              dec.spacing);
      try {
        const double lam = lambda_from_mode(scaled, mu, delta, *op);
        (*dec.lambdas_mode)[i] = lam;
        const GridSignal p_scaled = (*op)(scaled);
        (*dec.mode_residuals)[i] =
            (p_scaled.values() - lam * scaled.values()).norm() /
            p_scaled.values().norm();
      } catch (const UndefinedEigenvalue&) {
      }
    }
    const double lam = method == EigenvalueMethod::kFromMu
                           ? dec.lambdas_mu[i]
                           : (*dec.lambdas_mode)[i];
    const bool ok = mu > 0.0 && mu < 1.0 && std::isfinite(lam) && lam < 0.0;
    dec.physical[static_cast<std::size_t>(i)] = ok;
    if (ok) {
      dec.lambdas[i] = lam;
      dec.ext_times[i] = -1.0 / (lam * (2.0 - p));
    } else {
      std::ostringstream msg;
      msg << "mode " << i << " is non-physical (mu = " << mu
          << "); extinction time set to 0";
      dec.warnings.push_back(msg.str());
    }
  }
  return dec;
}

OrthoNsDecomposition orthons(const GridSignal& f, const HomogeneousOperator& op,
                             double delta, std::size_t steps,
                             const OrthoNsOptions& opts) {
  const SnapshotSequence seq = evolve_adaptive(f, op, delta, steps);
  return orthons_normalized(seq, delta, seq.times(), op.p, &op, opts);
}

OrthoNsDecomposition orthons(const GridSignal& f, const OperatorConfig& cfg,
                             double delta, std::size_t steps,
                             const OrthoNsOptions& opts) {
  cfg.validate();
  return orthons(f, p_laplacian_operator(cfg), delta, steps, opts);
}

namespace {

OrthoNsDecomposition decompose_on_grid(const SnapshotSequence& seq,
                                       const TimeGrid& grid, double p,
                                       const HomogeneousOperator* op,
                                       const OrthoNsOptions& opts) {
  if (grid.size() < 2) {
    return empty_decomposition(seq.snapshots.front(), p, kDefaultDelta,
                               op != nullptr);
  }
  const std::size_t samples = opts.samples == 0 ? grid.size() : opts.samples;
  const SnapshotSequence resampled = resample_uniform(seq, grid, samples);
  const std::vector<double> times =
      resample_values(grid, seq.times(), samples);
  OrthoNsDecomposition dec = orthons_normalized(
      resampled, resampled.dts.front(), times, p, op, opts);
  if (grid.truncated) {
    dec.warnings.push_back("sequence reached a steady state; rescaled grid "
                           "truncated to " + std::to_string(grid.size()) +
                           " snapshots");
  }
  return dec;
}

}  // namespace

OrthoNsDecomposition orthons_posterior(const SnapshotSequence& seq,
                                       const HomogeneousOperator& op,
                                       const OrthoNsOptions& opts) {
  const TimeGrid grid = rescale_known(seq, op, opts.policy);
  return decompose_on_grid(seq, grid, op.p, &op, opts);
}

OrthoNsDecomposition orthons_posterior(const SnapshotSequence& seq,
                                       const OperatorConfig& cfg,
                                       const OrthoNsOptions& opts) {
  cfg.validate();
  return orthons_posterior(seq, p_laplacian_operator(cfg), opts);
}

OrthoNsDecomposition orthons_posterior(const SnapshotSequence& seq, double p,
                                       const OrthoNsOptions& opts) {
  const TimeGrid grid = rescale_blind(seq, opts.policy);
  return decompose_on_grid(seq, grid, p, nullptr, opts);
}

GridSignal reconstruct_flow(const OrthoNsDecomposition& dec, double t) {
  if (!(t >= 0.0)) throw InvalidInput("reconstruct_flow: t must be >= 0");
  Eigen::VectorXd coeff = dec.alphas;
  const double e = 2.0 - dec.p;
  for (Index i = 0; i < dec.rank(); ++i) {
    if (t == 0.0) continue;
    double a = 0.0;
    if (dec.physical[static_cast<std::size_t>(i)]) {
      const double base = 1.0 + e * dec.lambdas[i] * t;
      a = base > 0.0 ? std::pow(base, 1.0 / e) : 0.0;
    }
    coeff[i] *= a;
  }
  return GridSignal(dec.shape, dec.modes * coeff, dec.spacing);
}

std::vector<std::pair<double, double>> spectrum(
    const OrthoNsDecomposition& dec) {
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(dec.rank()));
  for (Index i = 0; i < dec.rank(); ++i) {
    out.emplace_back(dec.ext_times[i], dec.alphas[i] * dec.alphas[i]);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.first < b.first;
  });
  return out;
}

GridSignal filter(const OrthoNsDecomposition& dec, const Eigen::VectorXd& h) {
  if (h.size() != dec.rank()) {
    throw InvalidInput("filter: need one gain per mode (" +
                       std::to_string(dec.rank()) + "), got " +
                       std::to_string(h.size()));
  }
  return GridSignal(dec.shape, dec.modes * dec.alphas.cwiseProduct(h),
                    dec.spacing);
}

Eigen::VectorXd band_indicator(const OrthoNsDecomposition& dec, double t_min,
                               double t_max) {
  Eigen::VectorXd h(dec.rank());
  for (Index i = 0; i < dec.rank(); ++i) {
    const double T = dec.ext_times[i];
    h[i] = (T >= t_min && T <= t_max) ? 1.0 : 0.0;
  }
  return h;
}

}  // namespace homoflow
