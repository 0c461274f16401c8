#include "homoflow/dmd.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

#include "homoflow/error.hpp"

namespace homoflow {
namespace {

using cd = std::complex<double>;

cd int_pow(cd base, Index k) {
  cd result(1.0, 0.0);
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

void require_dmd_input(const SnapshotSequence& seq, const char* where) {
  seq.validate();
  if (seq.steps() < 1) {
    throw InvalidInput(std::string(where) + ": need at least two snapshots");
  }
  if (!seq.uniform) {
    throw ContractError(std::string(where) +
                        ": sequence is not uniformly sampled; rescale and "
                        "resample_uniform it first");
  }
}

// Rotates each mode so that its coordinate is real and nonnegative, then
// sorts everything by |alpha| descending.
void canonicalize(DmdResult& res) {
  const Index r = res.rank;
  for (Index i = 0; i < r; ++i) {
    const double mag = std::abs(res.alpha[i]);
    if (mag == 0.0) continue;
    const cd phase = res.alpha[i] / mag;
    res.modes.col(i) *= phase;
    res.eigvecs.col(i) *= phase;
    res.alpha[i] = cd(mag, 0.0);
  }
  std::vector<Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(res.alpha[a]) > std::abs(res.alpha[b]);
  });
  Eigen::VectorXcd mu(r), alpha(r);
  Eigen::MatrixXcd modes(res.modes.rows(), r), w(r, r);
  for (Index i = 0; i < r; ++i) {
    const Index src = order[static_cast<std::size_t>(i)];
    mu[i] = res.mu[src];
    alpha[i] = res.alpha[src];
    modes.col(i) = res.modes.col(src);
    w.col(i) = res.eigvecs.col(src);
  }
  res.mu = std::move(mu);
  res.alpha = std::move(alpha);
  res.modes = std::move(modes);
  res.eigvecs = std::move(w);
}

struct Reduced {
  SnapshotMatrixPair pair;
  ReducedBasis basis;
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
};

Reduced reduce(const SnapshotSequence& seq, const RankPolicy& policy) {
  Reduced red;
  red.pair = build_pair(seq);
  red.basis = truncated_svd(red.pair.X0, policy);
  red.X = red.basis.U.transpose() * red.pair.X0;
  red.Y = red.basis.U.transpose() * red.pair.X1;
  return red;
}

DmdResult make_result(const SnapshotSequence& seq, Reduced& red) {
  DmdResult res;
  res.rank = red.basis.rank();
  res.dt = seq.dts.front();
  res.shape = seq.shape();
  res.spacing = seq.snapshots.front().spacing();
  res.basis = red.basis.U;
  res.warnings = red.basis.warnings;
  return res;
}

}  // namespace

double DmdResult::max_imag() const {
  double m = 0.0;
  if (mu.size() > 0) m = std::max(m, mu.imag().cwiseAbs().maxCoeff());
  if (alpha.size() > 0) m = std::max(m, alpha.imag().cwiseAbs().maxCoeff());
  if (modes.size() > 0) m = std::max(m, modes.imag().cwiseAbs().maxCoeff());
  return m;
}

double DmdResult::gram_deviation() const {
  if (rank == 0) return 0.0;
  const Eigen::MatrixXcd gram = modes.adjoint() * modes;
  return (gram - Eigen::MatrixXcd::Identity(rank, rank)).cwiseAbs().maxCoeff();
}

SnapshotMatrixPair build_pair(const SnapshotSequence& seq) {
  require_dmd_input(seq, "build_pair");
  const Index m = seq.snapshots.front().size();
  const Index n = static_cast<Index>(seq.steps());
  SnapshotMatrixPair pair{Eigen::MatrixXd(m, n), Eigen::MatrixXd(m, n)};
  for (Index k = 0; k < n; ++k) {
    pair.X0.col(k) = seq.snapshots[static_cast<std::size_t>(k)].values();
    pair.X1.col(k) = seq.snapshots[static_cast<std::size_t>(k + 1)].values();
  }
  return pair;
}

ReducedBasis truncated_svd(const Eigen::MatrixXd& A, const RankPolicy& policy) {
  if (A.size() == 0) throw InvalidInput("truncated_svd: empty matrix");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  if (!(sigma[0] > 0.0)) throw InvalidInput("truncated_svd: zero matrix");

  auto count_above = [&](double tol) {
    Index r = 0;
    while (r < sigma.size() && sigma[r] > tol * sigma[0]) ++r;
    return r;
  };

  ReducedBasis basis;
  Index r = 0;
  if (const auto* fixed = std::get_if<FixedRank>(&policy)) {
    if (fixed->r < 1) throw InvalidInput("truncated_svd: rank must be >= 1");
    const Index numerical = count_above(kDefaultRankTolerance);
    r = fixed->r;
    if (r > numerical) {
      std::ostringstream msg;
      msg << "requested rank " << r << " exceeds numerical rank " << numerical
          << "; using " << numerical;
      basis.warnings.push_back(msg.str());
      r = numerical;
    }
  } else {
    const double tol = std::get<RelativeThreshold>(policy).tol;
    if (!(tol >= 0.0)) throw InvalidInput("truncated_svd: tol must be >= 0");
    r = std::max<Index>(1, count_above(tol));
  }
  basis.U = svd.matrixU().leftCols(r);
  basis.S = sigma.head(r);
  basis.V = svd.matrixV().leftCols(r);
  return basis;
}

DmdResult dmd(const SnapshotSequence& seq, const RankPolicy& policy) {
  require_dmd_input(seq, "dmd");
  Reduced red = reduce(seq, policy);
  DmdResult res = make_result(seq, red);
  const Index r = res.rank;

  res.F = red.Y * red.basis.V * red.basis.S.cwiseInverse().asDiagonal();

  Eigen::EigenSolver<Eigen::MatrixXd> es(res.F);
  if (es.info() != Eigen::Success) {
    throw Error("dmd: eigen-decomposition of the DMD matrix failed");
  }
  res.mu = es.eigenvalues();
  res.eigvecs = es.eigenvectors();

  Eigen::JacobiSVD<Eigen::MatrixXd> fsvd(res.F);
  if (fsvd.singularValues()[r - 1] <= 1e-14 * fsvd.singularValues()[0]) {
    res.warnings.push_back("DMD matrix F is rank deficient");
  }

  const Eigen::VectorXd x0 = red.X.col(0);
  Eigen::JacobiSVD<Eigen::MatrixXcd> wsvd(res.eigvecs);
  const double smin = wsvd.singularValues()[r - 1];
  const double cond = smin > 0.0 ? wsvd.singularValues()[0] / smin
                                 : std::numeric_limits<double>::infinity();
  if (!(cond < 1e12)) {
    res.diagonalizable = false;
    res.warnings.push_back("DMD matrix F is not diagonalizable; modes are "
                           "best-effort eigenvectors");
    res.alpha = res.eigvecs.colPivHouseholderQr().solve(x0.cast<cd>());
  } else {
    res.alpha = res.eigvecs.partialPivLu().solve(x0.cast<cd>());
  }
  res.modes = res.basis.cast<cd>() * res.eigvecs;
  canonicalize(res);
  return res;
}

DmdResult sdmd(const SnapshotSequence& seq, const RankPolicy& policy) {
  require_dmd_input(seq, "sdmd");
  Reduced red = reduce(seq, policy);
  DmdResult res = make_result(seq, red);
  res.symmetric = true;

  const Eigen::MatrixXd G = red.X * red.X.transpose();
  const Eigen::MatrixXd C =
      red.X * red.Y.transpose() + red.Y * red.X.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gs(G, Eigen::EigenvaluesOnly);
  const double lmax = gs.eigenvalues().maxCoeff();
  const double lmin = gs.eigenvalues().minCoeff();
  res.sylvester_condition =
      lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(res.sylvester_condition < 1e12)) {
    std::ostringstream msg;
    msg << "XX^T is near-singular (condition " << res.sylvester_condition
        << "); regularized Sylvester solve";
    res.warnings.push_back(msg.str());
  }

  Eigen::MatrixXd F = solve_symmetric_sylvester(G, C);
  res.F = 0.5 * (F + F.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res.F);
  if (es.info() != Eigen::Success) {
    throw Error("sdmd: eigen-decomposition of the symmetric DMD matrix failed");
  }
  const Eigen::MatrixXd& W = es.eigenvectors();
  const Eigen::VectorXd alpha = W.transpose() * red.X.col(0);
  res.mu = es.eigenvalues().cast<cd>();
  res.eigvecs = W.cast<cd>();
  res.alpha = alpha.cast<cd>();
  res.modes = (res.basis * W).cast<cd>();
  canonicalize(res);
  return res;
}

Eigen::MatrixXd solve_symmetric_sylvester(const Eigen::MatrixXd& G,
                                          const Eigen::MatrixXd& C,
                                          double reg) {
  if (G.rows() != G.cols() || C.rows() != C.cols() || G.rows() != C.rows()) {
    throw InvalidInput("solve_symmetric_sylvester: G and C must be square "
                       "and of equal size");
  }
  const double gscale = std::max(1.0, G.cwiseAbs().maxCoeff());
  const double cscale = std::max(1.0, C.cwiseAbs().maxCoeff());
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-10 * gscale ||
      (C - C.transpose()).cwiseAbs().maxCoeff() > 1e-10 * cscale) {
    throw InvalidInput("solve_symmetric_sylvester: G and C must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()));
  const Eigen::VectorXd l = es.eigenvalues().cwiseMax(0.0);
  const double lmax = l.maxCoeff();
  if (!(lmax > 0.0)) {
    throw InvalidInput("solve_symmetric_sylvester: G is zero (no data)");
  }
  const Eigen::MatrixXd& Q = es.eigenvectors();
  Eigen::MatrixXd Ft = Q.transpose() * C * Q;
  const Index r = G.rows();
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < r; ++j) {
      const double s = l[i] + l[j];
      Ft(i, j) = s > reg * lmax ? Ft(i, j) / s : 0.0;
    }
  }
  return Q * Ft * Q.transpose();
}

ContinuousEigs continuous_eigs(const DmdResult& result) {
  if (!(result.dt > 0.0)) throw InvalidInput("continuous_eigs: dt must be > 0");
  ContinuousEigs out;
  out.values.resize(result.rank);
  for (Index i = 0; i < result.rank; ++i) {
    const cd m = result.mu[i];
    if (m == cd(0.0, 0.0)) {
      throw DomainError("continuous_eigs: mu = 0 has no logarithm");
    }
    if (m.imag() == 0.0 && m.real() < 0.0) {
      std::ostringstream msg;
      msg << "mu_" << i << " = " << m.real()
          << " is negative; complex logarithm (alternating mode)";
      out.warnings.push_back(msg.str());
    }
    out.values[i] = std::log(m) / result.dt;
  }
  return out;
}

GridSignal reconstruct_discrete(const DmdResult& result, Index k) {
  if (k < 0) throw InvalidInput("reconstruct_discrete: k must be >= 0");
  Eigen::VectorXcd coeff(result.rank);
  for (Index i = 0; i < result.rank; ++i) {
    coeff[i] = result.alpha[i] * int_pow(result.mu[i], k);
  }
  const Eigen::VectorXd values = (result.modes * coeff).real();
  return GridSignal(result.shape, values, result.spacing);
}

double err_dmd(const DmdResult& result, const SnapshotMatrixPair& pair) {
  if (pair.X0.rows() != result.basis.rows()) {
    throw InvalidInput("err_dmd: pair and result have different sizes");
  }
  const Eigen::MatrixXd X = result.basis.transpose() * pair.X0;
  const Eigen::MatrixXd Y = result.basis.transpose() * pair.X1;
  return (Y - result.F * X).squaredNorm();
}

double err_rec_discrete(const DmdResult& result, const SnapshotSequence& seq) {
  double sum = 0.0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const GridSignal rec = reconstruct_discrete(result, static_cast<Index>(k));
    require_same_shape(rec, seq.snapshots[k], "err_rec_discrete");
    sum += (rec.values() - seq.snapshots[k].values()).squaredNorm();
  }
  return sum;
}

}  // namespace homoflow
