#pragma once

#include <Eigen/Core>

#include <string>
#include <variant>
#include <vector>

#include "homoflow/flow.hpp"
#include "homoflow/grid_signal.hpp"

namespace homoflow {

/// Data matrices X0 = [psi_0 .. psi_{N-1}], X1 = [psi_1 .. psi_N], one
/// flattened snapshot per column.
struct SnapshotMatrixPair {
  Eigen::MatrixXd X0;
  Eigen::MatrixXd X1;
};

/// Keep exactly r singular triplets (shrunk to the numerical rank).
struct FixedRank {
  Index r;
};

/// Keep sigma_i with sigma_i / sigma_1 > tol.
struct RelativeThreshold {
  double tol = 1e-10;
};

using RankPolicy = std::variant<FixedRank, RelativeThreshold>;

inline constexpr double kDefaultRankTolerance = 1e-10;

struct ReducedBasis {
  Eigen::MatrixXd U;  // M x r, orthonormal columns
  Eigen::VectorXd S;  // r singular values, descending, positive
  Eigen::MatrixXd V;  // N x r, orthonormal columns
  std::vector<std::string> warnings;

  Index rank() const { return S.size(); }
};

/// Modes, eigenvalues and coordinates of a (symmetric) DMD.
///
/// Entries are sorted by |alpha| descending and each mode's phase is chosen so
/// that alpha_i is real and nonnegative. For sdmd results every imaginary part
/// is exactly zero and the modes are orthonormal.
struct DmdResult {
  Eigen::VectorXcd mu;
  Eigen::MatrixXcd modes;  // M x r
  Eigen::VectorXcd alpha;
  Eigen::MatrixXd F;       // r x r reduced map
  Eigen::MatrixXd basis;   // U_r, M x r
  Eigen::MatrixXcd eigvecs;  // W, columns w_i (same order as mu)
  Index rank = 0;
  double dt = 1.0;
  GridShape shape;
  double spacing = 1.0;

  bool symmetric = false;
  bool diagonalizable = true;
  /// lambda_max / lambda_min of XX^T (sdmd only).
  double sylvester_condition = 0.0;
  std::vector<std::string> warnings;

  /// Max |Im| over mu, modes and alpha.
  double max_imag() const;
  /// ||modes^* modes - I||_max.
  double gram_deviation() const;
};

SnapshotMatrixPair build_pair(const SnapshotSequence& seq);

ReducedBasis truncated_svd(const Eigen::MatrixXd& A,
                           const RankPolicy& policy = RelativeThreshold{});

/// Standard DMD: F = U_r^T X1 V_r S_r^{-1}, general eigen-decomposition.
DmdResult dmd(const SnapshotSequence& seq,
              const RankPolicy& policy = RelativeThreshold{});

/// Symmetric DMD: F minimizes ||Y - F X||_F over symmetric F, i.e. solves
/// F XX^T + XX^T F = XY^T + YX^T.
DmdResult sdmd(const SnapshotSequence& seq,
               const RankPolicy& policy = RelativeThreshold{});

/// Solves F G + G F = C for symmetric PSD G and symmetric C via G = Q L Q^T.
/// Reduced entries whose pair sum l_i + l_j is <= reg * l_max are set to zero.
Eigen::MatrixXd solve_symmetric_sylvester(const Eigen::MatrixXd& G,
                                          const Eigen::MatrixXd& C,
                                          double reg = 1e-12);

struct ContinuousEigs {
  Eigen::VectorXcd values;  // ln(mu_i) / dt, principal branch
  std::vector<std::string> warnings;
};

ContinuousEigs continuous_eigs(const DmdResult& result);

/// psi~_k = sum_i alpha_i mu_i^k phi_i (real part).
GridSignal reconstruct_discrete(const DmdResult& result, Index k);

/// ||Y - F X||_F^2 in the reduced coordinates of `result`.
double err_dmd(const DmdResult& result, const SnapshotMatrixPair& pair);

/// sum_{k=0}^N ||psi~_k - psi_k||^2.
double err_rec_discrete(const DmdResult& result, const SnapshotSequence& seq);

}  // namespace homoflow
