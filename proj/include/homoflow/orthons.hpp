#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homoflow/dmd.hpp"
#include "homoflow/flow.hpp"
#include "homoflow/grid_signal.hpp"
#include "homoflow/operators.hpp"
#include "homoflow/rescale.hpp"

namespace homoflow {

enum class EigenvalueMethod {
  kAuto,      // kFromMode when the operator is known, kFromMu otherwise
  kFromMu,    // least-squares fit of the decay profile to mu^k
  kFromMode,  // generalized Rayleigh quotient of the scaled mode
};

inline constexpr double kDefaultDelta = 0.5;

/// Orthonormal modes phi_i with coordinates alpha_i, nonlinear eigenvalues
/// lambda_i and extinction times T_i. Entries are sorted by |alpha| descending.
///
/// A mode is physical when its DMD eigenvalue lies in (0, 1) and the chosen
/// eigenvalue estimate is finite and negative. Other modes are kept with
/// lambda = -inf and T = 0.
struct OrthoNsDecomposition {
  GridShape shape;
  double spacing = 1.0;
  double p = 1.5;
  double delta = kDefaultDelta;
  EigenvalueMethod method = EigenvalueMethod::kFromMu;

  Eigen::MatrixXd modes;  // M x r
  Eigen::VectorXd alphas;
  Eigen::VectorXd mus;
  Eigen::VectorXd lambdas;
  Eigen::VectorXd lambdas_mu;
  std::optional<Eigen::VectorXd> lambdas_mode;
  /// ||P(a phi) - lambda_phi a phi|| / ||P(a phi)|| with a = alpha_i.
  std::optional<Eigen::VectorXd> mode_residuals;
  Eigen::VectorXd ext_times;
  std::vector<bool> physical;
  std::vector<std::string> warnings;

  Index rank() const { return alphas.size(); }
  bool empty() const { return alphas.size() == 0; }
  GridSignal mode(Index i) const;
  /// f^ = sum_i alpha_i phi_i.
  GridSignal projection() const;
};

struct OrthoNsOptions {
  RankPolicy rank = RelativeThreshold{};
  EigenvalueMethod method = EigenvalueMethod::kAuto;
  /// Uniform samples drawn after rescaling; 0 keeps the number of grid points.
  std::size_t samples = 0;
  NonDissipativePolicy policy = NonDissipativePolicy::kError;
};

/// Adaptive flow from f, symmetric DMD, eigenvalue recovery.
OrthoNsDecomposition orthons(const GridSignal& f, const HomogeneousOperator& op,
                             double delta, std::size_t steps,
                             const OrthoNsOptions& opts = {});
OrthoNsDecomposition orthons(const GridSignal& f, const OperatorConfig& cfg,
                             double delta, std::size_t steps,
                             const OrthoNsOptions& opts = {});

/// Decomposes a sequence that is already geometric in the rescaled time
/// (one rescaled step = delta between consecutive snapshots). `times` are the
/// physical times of the snapshots and feed lambda_from_mu. `op` may be null.
OrthoNsDecomposition orthons_normalized(const SnapshotSequence& seq,
                                        double delta,
                                        const std::vector<double>& times,
                                        double p,
                                        const HomogeneousOperator* op,
                                        const OrthoNsOptions& opts = {});

/// Rescales an arbitrary dissipative sequence with the known operator,
/// resamples it uniformly and decomposes it.
OrthoNsDecomposition orthons_posterior(const SnapshotSequence& seq,
                                       const HomogeneousOperator& op,
                                       const OrthoNsOptions& opts = {});
OrthoNsDecomposition orthons_posterior(const SnapshotSequence& seq,
                                       const OperatorConfig& cfg,
                                       const OrthoNsOptions& opts = {});
/// Blind variant: uses only the snapshots (and their dts for lambda_from_mu).
OrthoNsDecomposition orthons_posterior(const SnapshotSequence& seq, double p,
                                       const OrthoNsOptions& opts = {});

/// lambda_phi = ((1 - mu) / delta) ||P(phi)||^2 / <P(phi), phi>.
double lambda_from_mode(const GridSignal& phi, double mu, double delta,
                        const HomogeneousOperator& op);
double lambda_from_mode(const GridSignal& phi, double mu, double delta,
                        const OperatorConfig& cfg);

/// Least-squares fit of 1 + (2-p) lambda t_k = mu^{k(2-p)}:
///   lambda = (sum mu^{k(2-p)} t_k - sum t_k) / ((2-p) sum t_k^2).
double lambda_from_mu(double mu, const std::vector<double>& times, double p);

/// psi^(t) = sum_i alpha_i phi_i a_i(t).
GridSignal reconstruct_flow(const OrthoNsDecomposition& dec, double t);

/// Pairs (T_i, alpha_i^2) sorted by T ascending.
std::vector<std::pair<double, double>> spectrum(const OrthoNsDecomposition& dec);

/// f_h = sum_i h_i alpha_i phi_i.
GridSignal filter(const OrthoNsDecomposition& dec, const Eigen::VectorXd& h);

/// Indicator of T_i in [t_min, t_max].
Eigen::VectorXd band_indicator(const OrthoNsDecomposition& dec, double t_min,
                               double t_max);

}  // namespace homoflow
