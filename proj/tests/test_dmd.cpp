#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <complex>

#include "homoflow/analytic.hpp"
#include "homoflow/dmd.hpp"
#include "homoflow/error.hpp"
#include "support.hpp"

using namespace homoflow;
using testing::Gen;
using cd = std::complex<double>;

namespace {

SnapshotSequence linear_system(const Eigen::MatrixXd& A, const Eigen::VectorXd& x0,
                               std::size_t count) {
  std::vector<GridSignal> snaps;
  Eigen::VectorXd x = x0;
  for (std::size_t k = 0; k < count; ++k) {
    snaps.push_back(GridSignal::line(x));
    x = A * x;
  }
  return SnapshotSequence::make_uniform(std::move(snaps), 1.0);
}

SnapshotSequence separable(const GridSignal& f, const std::vector<double>& a, double dt = 1.0) {
  std::vector<GridSignal> snaps;
  for (double ak : a) snaps.push_back(f.with_values(ak * f.values()));
  return SnapshotSequence::make_uniform(std::move(snaps), dt);
}

SnapshotSequence random_sequence(Gen& gen, Index m, std::size_t count) {
  std::vector<GridSignal> snaps;
  for (std::size_t k = 0; k < count; ++k) snaps.push_back(gen.line(m));
  return SnapshotSequence::make_uniform(std::move(snaps), 1.0);
}

Eigen::Matrix2d symmetric_system() {
  return (Eigen::Matrix2d() << 0.1, 0.6, 0.6, 0.1).finished();
}

void check_roots(const DmdResult& res) {
  std::vector<double> re = {res.mu[0].real(), res.mu[1].real()};
  std::sort(re.begin(), re.end());
  CHECK(std::abs(re[0] + 0.5) <= 1e-12);
  CHECK(std::abs(re[1] - 0.7) <= 1e-12);
  CHECK(std::abs(res.mu[0].imag()) <= 1e-12);
  CHECK(std::abs(res.mu[1].imag()) <= 1e-12);
}

}  // namespace

TEST_CASE("data matrices") {
  std::vector<GridSignal> snaps;
  for (double v : {1.0, 2.0, 4.0}) snaps.push_back(GridSignal::line(Eigen::VectorXd::Constant(1, v)));
  const SnapshotMatrixPair pair = build_pair(SnapshotSequence::make_uniform(snaps, 1.0));
  CHECK(pair.X0.cols() == 2);
  CHECK(pair.X0(0, 0) == 1.0);
  CHECK(pair.X0(0, 1) == 2.0);
  CHECK(pair.X1(0, 0) == 2.0);
  CHECK(pair.X1(0, 1) == 4.0);
  CHECK(pair.X0.col(1) == pair.X1.col(0));

  SnapshotSequence uneven;
  uneven.snapshots = snaps;
  uneven.dts = {0.1, 0.2};
  CHECK_THROWS_AS(build_pair(uneven), ContractError);
  CHECK_THROWS_AS(dmd(uneven), ContractError);
}

TEST_CASE("truncated SVD") {
  SUBCASE("rank one") {
    Eigen::VectorXd f(4), a(3);
    f << 1, -2, 0.5, 3;
    a << 1, 0.6, 0.2;
    const ReducedBasis b = truncated_svd(f * a.transpose());
    REQUIRE(b.rank() == 1);
    CHECK(b.S[0] == doctest::Approx(f.norm() * a.norm()).epsilon(1e-14));
    CHECK(std::abs(std::abs(b.U.col(0).dot(f / f.norm())) - 1.0) <= 1e-14);
  }
  SUBCASE("identity with fixed rank") {
    const ReducedBasis b = truncated_svd(Eigen::MatrixXd::Identity(3, 3), FixedRank{2});
    REQUIRE(b.rank() == 2);
    CHECK(b.S[0] == doctest::Approx(1.0));
    CHECK(b.S[1] == doctest::Approx(1.0));
    CHECK((b.U.transpose() * b.U - Eigen::Matrix2d::Identity()).norm() <= 1e-14);
  }
  SUBCASE("best rank-r error matches a full decomposition") {
    Gen gen(31);
    const Eigen::MatrixXd A = gen.matrix(50, 10);
    const Eigen::JacobiSVD<Eigen::MatrixXd> full(A);
    for (Index r : {1, 3, 7}) {
      const ReducedBasis b = truncated_svd(A, FixedRank{r});
      const double err = (A - b.U * b.S.asDiagonal() * b.V.transpose()).squaredNorm();
      const double tail = full.singularValues().tail(10 - r).squaredNorm();
      CHECK(testing::rel_diff(err, tail) <= 1e-10);
      CHECK((b.U.transpose() * b.U - Eigen::MatrixXd::Identity(r, r)).norm() <= 1e-10);
      CHECK((b.V.transpose() * b.V - Eigen::MatrixXd::Identity(r, r)).norm() <= 1e-10);
    }
  }
  SUBCASE("fixed rank above the numerical rank shrinks with a warning") {
    Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(6, 1.0, 2.0);
    const ReducedBasis b = truncated_svd(f * Eigen::RowVector3d(1, 2, 3), FixedRank{3});
    CHECK(b.rank() == 1);
    CHECK(!b.warnings.empty());
  }
}

TEST_CASE("dmd recovers the 2x2 symmetric system") {
  const SnapshotSequence seq = linear_system(symmetric_system(), Eigen::Vector2d(1, 0), 8);
  const DmdResult res = dmd(seq, FixedRank{2});
  check_roots(res);
  CHECK(res.diagonalizable);
  for (Index k = 0; k <= 7; ++k) {
    const Eigen::VectorXd truth = seq.snapshots[static_cast<std::size_t>(k)].values();
    CHECK((reconstruct_discrete(res, k).values() - truth).norm() <= 1e-10);
  }
}

TEST_CASE("sdmd recovers the 2x2 symmetric system") {
  const DmdResult res = sdmd(linear_system(symmetric_system(), Eigen::Vector2d(1, 0), 8), FixedRank{2});
  check_roots(res);
  CHECK(res.max_imag() == 0.0);
  CHECK(res.symmetric);
}

TEST_CASE("geometric rank-one data") {
  Gen gen(41);
  const GridSignal f = gen.image(3, 4);
  const SnapshotSequence seq = separable(f, {1.0, 0.5, 0.25, 0.125, 0.0625});
  for (const DmdResult& res : {dmd(seq), sdmd(seq)}) {
    REQUIRE(res.rank == 1);
    CHECK(std::abs(res.mu[0] - cd(0.5, 0.0)) <= 1e-14);
    CHECK(res.alpha[0].real() == doctest::Approx(norm(f)).epsilon(1e-14));
    CHECK((res.modes.col(0).real() - f.values() / norm(f)).norm() <= 1e-14);
    CHECK(err_dmd(res, build_pair(seq)) <= 1e-28);
    CHECK(err_rec_discrete(res, seq) <= 1e-26);
    CHECK((reconstruct_discrete(res, 0).values() - f.values()).norm() <= 1e-14 * norm(f));
  }
}

TEST_CASE("non-geometric rank-one data") {
  const GridSignal f = GridSignal::line(Eigen::VectorXd::Unit(3, 1));
  const SnapshotSequence seq = separable(f, {1.0, 0.6, 0.2});
  const DmdResult res = dmd(seq, FixedRank{1});
  CHECK(res.mu[0].real() == doctest::Approx(0.5294117647058822).epsilon(1e-14));
  CHECK(err_dmd(res, build_pair(seq)) == doctest::Approx(0.018823529411764794).epsilon(1e-12));
}

TEST_CASE("property: rank-one dmd equals the closed form") {
  Gen gen(42);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = static_cast<std::size_t>(gen.index(2, 15));
    std::vector<double> a(n + 1);
    a[0] = 1.0;
    for (std::size_t k = 1; k <= n; ++k) a[k] = gen.uniform(-1.5, 1.5);
    const GridSignal f = gen.signal();
    const SnapshotSequence seq = separable(f, a);
    const DmdResult res = dmd(seq, FixedRank{1});
    const Rank1Dmd ref = analytic_dmd_rank1(a, norm(f));
    CHECK(std::abs(res.mu[0].real() - ref.mu) <= 1e-10 * std::max(1.0, std::abs(ref.mu)));
    CHECK(std::abs(res.alpha[0].real() - ref.alpha) <= 1e-10 * ref.alpha);
    CHECK((res.modes.col(0).real() - ref.phi_scale * f.values()).norm() <= 1e-10);
    CHECK(std::abs(err_dmd(res, build_pair(seq)) - ref.err_dmd) <=
          1e-10 * std::max(1.0, ref.err_dmd));
  }
}

TEST_CASE("reconstruction of uniformly sampled eigenfunction data is mu^k f") {
  const GridSignal f = GridSignal::line(Eigen::VectorXd::LinSpaced(7, -1.0, 2.0));
  const FlowParams params{-1.0, 1.5, squared_norm(f)};
  const SnapshotSequence seq = synth_eigenflow(f, params, UniformSampling{0.1, 12});
  const DmdResult res = dmd(seq, FixedRank{1});
  const double mu = res.mu[0].real();
  for (Index k = 0; k < 12; ++k) {
    const Eigen::VectorXd expect = std::pow(mu, static_cast<double>(k)) * f.values();
    CHECK((reconstruct_discrete(res, k).values() - expect).norm() <= 1e-12 * norm(f));
  }
}

TEST_CASE("adaptive-sampled eigenfunction data is reconstructed exactly") {
  Gen gen(43);
  const GridSignal f = gen.image(4, 4);
  const SnapshotSequence raw = synth_eigenflow(f, {-0.2, 1.4, squared_norm(f)}, AdaptiveSampling{0.3, 15});
  const SnapshotSequence seq = SnapshotSequence::make_uniform(raw.snapshots, 0.3);
  const DmdResult res = sdmd(seq);
  REQUIRE(res.rank == 1);
  CHECK(std::abs(res.mu[0].real() - 0.7) <= 1e-12);
  CHECK(err_rec_discrete(res, seq) <= 1e-20 * squared_norm(f));
}

TEST_CASE("symmetric Sylvester solver") {
  const Eigen::Matrix2d C = (Eigen::Matrix2d() << 2, 3, 3, 8).finished();
  CHECK((solve_symmetric_sylvester(Eigen::Matrix2d::Identity(), C) - C / 2).norm() <= 1e-15);
  const Eigen::Matrix2d G = Eigen::Vector2d(1, 2).asDiagonal();
  const Eigen::MatrixXd F = solve_symmetric_sylvester(G, C);
  CHECK((F - (Eigen::Matrix2d() << 1, 1, 1, 2).finished()).norm() <= 1e-14);
  CHECK((F * G + G * F - C).norm() <= 1e-14);
  CHECK_THROWS_AS(solve_symmetric_sylvester(Eigen::Matrix2d::Zero(), C), InvalidInput);
  CHECK_THROWS_AS(solve_symmetric_sylvester((Eigen::Matrix2d() << 1, 2, 0, 1).finished(), C),
                  InvalidInput);

  Gen gen(44);
  for (int trial = 0; trial < 20; ++trial) {
    const Index r = gen.index(2, 8);
    const Eigen::MatrixXd B = gen.matrix(r, r + 3);
    const Eigen::MatrixXd Gr = B * B.transpose();
    const Eigen::MatrixXd S = gen.matrix(r, r);
    const Eigen::MatrixXd F0 = S + S.transpose();
    const Eigen::MatrixXd Cr = F0 * Gr + Gr * F0;
    CHECK((solve_symmetric_sylvester(Gr, Cr) - F0).norm() <= 1e-9 * F0.norm());
  }
}

TEST_CASE("property: sdmd output contract") {
  Gen gen(45);
  for (int trial = 0; trial < 30; ++trial) {
    const SnapshotSequence seq = random_sequence(gen, gen.index(5, 30), static_cast<std::size_t>(gen.index(3, 12)));
    const DmdResult res = sdmd(seq);
    CHECK((res.F - res.F.transpose()).norm() <= 1e-10 * res.F.norm());
    CHECK(res.max_imag() == 0.0);
    CHECK(res.gram_deviation() <= 1e-8);
    const SnapshotMatrixPair pair = build_pair(seq);
    const Eigen::MatrixXd X = res.basis.transpose() * pair.X0;
    const Eigen::MatrixXd Y = res.basis.transpose() * pair.X1;
    const Eigen::MatrixXd C = X * Y.transpose() + Y * X.transpose();
    const Eigen::MatrixXd G = X * X.transpose();
    CHECK((res.F * G + G * res.F - C).norm() <= 1e-9 * C.norm());
  }
}

TEST_CASE("property: sdmd is a local minimum among symmetric maps") {
  Gen gen(46);
  for (int trial = 0; trial < 20; ++trial) {
    const SnapshotSequence seq = random_sequence(gen, 12, 9);
    const DmdResult res = sdmd(seq);
    const SnapshotMatrixPair pair = build_pair(seq);
    const double best = err_dmd(res, pair);
    const Eigen::MatrixXd X = res.basis.transpose() * pair.X0;
    const Eigen::MatrixXd Y = res.basis.transpose() * pair.X1;
    for (int k = 0; k < 100; ++k) {
      const Eigen::MatrixXd S = gen.matrix(res.rank, res.rank);
      const Eigen::MatrixXd Fp = res.F + 1e-3 * (S + S.transpose());
      CHECK((Y - Fp * X).squaredNorm() >= best);
    }
  }
}

TEST_CASE("property: dmd residual equals the unconstrained least-squares residual") {
  Gen gen(47);
  for (int trial = 0; trial < 20; ++trial) {
    const SnapshotSequence seq = random_sequence(gen, gen.index(10, 25), static_cast<std::size_t>(gen.index(3, 9)));
    const DmdResult res = dmd(seq);
    const SnapshotMatrixPair pair = build_pair(seq);
    const Eigen::MatrixXd X = res.basis.transpose() * pair.X0;
    const Eigen::MatrixXd Y = res.basis.transpose() * pair.X1;
    const Eigen::MatrixXd Fls =
        X.transpose().completeOrthogonalDecomposition().solve(Y.transpose()).transpose();
    const double brute = (Y - Fls * X).squaredNorm();
    CHECK(std::abs(err_dmd(res, pair) - brute) <= 1e-10 * std::max(1.0, brute));
  }
}

TEST_CASE("property: reconstruction at k = 0 is the projection of the first snapshot") {
  Gen gen(48);
  for (int trial = 0; trial < 20; ++trial) {
    const SnapshotSequence seq = random_sequence(gen, 15, static_cast<std::size_t>(gen.index(3, 8)));
    const DmdResult res = dmd(seq);
    if (!res.diagonalizable) continue;
    const Eigen::VectorXd psi0 = seq.snapshots[0].values();
    const Eigen::VectorXd proj = res.basis * (res.basis.transpose() * psi0);
    CHECK((reconstruct_discrete(res, 0).values() - proj).norm() <= 1e-10 * psi0.norm());
    CHECK(std::isfinite(res.gram_deviation()));
  }
}

TEST_CASE("modes are sorted by coefficient with a real nonnegative coefficient") {
  Gen gen(49);
  const DmdResult res = dmd(random_sequence(gen, 10, 8));
  for (Index i = 0; i < res.rank; ++i) {
    CHECK(res.alpha[i].imag() == 0.0);
    CHECK(res.alpha[i].real() >= 0.0);
    if (i > 0) CHECK(std::abs(res.alpha[i]) <= std::abs(res.alpha[i - 1]));
  }
}

TEST_CASE("continuous-time eigenvalues") {
  DmdResult res;
  res.rank = 3;
  res.dt = 1.0;
  res.mu = Eigen::VectorXcd(3);
  res.mu << std::exp(-0.2), 1.0, -0.5;
  const ContinuousEigs ce = continuous_eigs(res);
  CHECK(ce.values[0].real() == doctest::Approx(-0.2).epsilon(1e-15));
  CHECK(ce.values[1] == cd(0.0, 0.0));
  CHECK(ce.values[2].imag() == doctest::Approx(M_PI));
  CHECK(ce.warnings.size() == 1);

  res.rank = 1;
  res.dt = 0.1;
  res.mu = Eigen::VectorXcd::Constant(1, 0.5);
  CHECK(continuous_eigs(res).values[0].real() ==
        doctest::Approx(-6.931471805599452).epsilon(1e-14));
  res.mu[0] = 0.0;
  CHECK_THROWS_AS(continuous_eigs(res), DomainError);
}
