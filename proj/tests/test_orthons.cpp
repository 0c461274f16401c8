#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "homoflow/error.hpp"
#include "homoflow/flow.hpp"
#include "homoflow/operators.hpp"
#include "homoflow/orthons.hpp"
#include "support.hpp"

using namespace homoflow;
using testing::Gen;

namespace {

constexpr double kLambda = -0.0269;
constexpr double kNormSq = 249.1;

GridSignal scaled_image() {
  Gen gen(71);
  GridSignal f = gen.image(16, 16);
  return f.with_values(f.values() * std::sqrt(kNormSq) / norm(f));
}

double sum_sq(const Eigen::VectorXd& v) { return v.squaredNorm(); }

void check_contract(const OrthoNsDecomposition& dec) {
  const Index r = dec.rank();
  CHECK((dec.modes.transpose() * dec.modes - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff() <= 1e-8);
  for (Index i = 0; i < r; ++i) {
    if (dec.physical[static_cast<std::size_t>(i)]) {
      CHECK(dec.lambdas[i] < 0.0);
      CHECK(testing::rel_diff(dec.ext_times[i], -1.0 / (dec.lambdas[i] * (2.0 - dec.p))) <= 1e-12);
    } else {
      CHECK(dec.ext_times[i] == 0.0);
      CHECK(dec.lambdas[i] == -std::numeric_limits<double>::infinity());
    }
    if (i > 0) CHECK(std::abs(dec.alphas[i]) <= std::abs(dec.alphas[i - 1]));
  }
  CHECK(testing::rel_diff(sum_sq(dec.alphas), squared_norm(dec.projection())) <= 1e-10);
}

}  // namespace

TEST_CASE("single eigenfunction through the adaptive flow") {
  const GridSignal f = scaled_image();
  const HomogeneousOperator op = norm_power_operator(kLambda, 1.5, norm(f));
  const OrthoNsDecomposition dec = orthons(f, op, 0.5, 40);
  check_contract(dec);
  REQUIRE(dec.rank() >= 1);
  CHECK(dec.method == EigenvalueMethod::kFromMode);
  CHECK(dec.alphas[0] * dec.alphas[0] == doctest::Approx(kNormSq).epsilon(1e-10));
  CHECK(dec.mus[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dec.lambdas[0] == doctest::Approx(kLambda).epsilon(1e-10));
  CHECK(dec.ext_times[0] == doctest::Approx(74.3).epsilon(1e-3));
  REQUIRE(dec.mode_residuals.has_value());
  CHECK((*dec.mode_residuals)[0] <= 1e-6);
  for (Index i = 1; i < dec.rank(); ++i) CHECK(dec.alphas[i] * dec.alphas[i] < 1e-6);
  const auto sp = spectrum(dec);
  CHECK(sp.back().first == doctest::Approx(74.3).epsilon(1e-3));
  CHECK(sp.back().second == doctest::Approx(kNormSq).epsilon(1e-10));
}

TEST_CASE("single eigenfunction from exact adaptive samples") {
  const GridSignal f = scaled_image();
  const FlowParams params{kLambda, 1.5, kNormSq};
  const SnapshotSequence seq = synth_eigenflow(f, params, AdaptiveSampling{0.5, 40});
  OrthoNsOptions opts;
  opts.method = EigenvalueMethod::kFromMu;
  const OrthoNsDecomposition dec = orthons_normalized(seq, 0.5, seq.times(), 1.5, nullptr, opts);
  check_contract(dec);
  CHECK(dec.alphas[0] * dec.alphas[0] == doctest::Approx(kNormSq).epsilon(1e-10));
  CHECK(dec.lambdas[0] == doctest::Approx(kLambda).epsilon(1e-9));
  CHECK(dec.ext_times[0] == doctest::Approx(74.3).epsilon(1e-3));
  CHECK(!dec.lambdas_mode.has_value());
}

TEST_CASE("single eigenfunction through the blind posterior path") {
  const GridSignal f = scaled_image();
  const FlowParams params{kLambda, 1.5, kNormSq};
  const double T = extinction_time(params);
  const std::size_t n = 1000;
  const SnapshotSequence full = synth_eigenflow(f, params, UniformSampling{T / n, n - 1});
  const OrthoNsDecomposition dec = orthons_posterior(full, 1.5);
  check_contract(dec);
  CHECK(dec.method == EigenvalueMethod::kFromMu);
  CHECK(dec.alphas[0] * dec.alphas[0] == doctest::Approx(kNormSq).epsilon(1e-10));
  CHECK(dec.lambdas[0] == doctest::Approx(kLambda).epsilon(1e-2));
  CHECK(dec.ext_times[0] == doctest::Approx(74.3).epsilon(1e-2));
}

TEST_CASE("zero input gives an empty decomposition") {
  const GridSignal z = GridSignal::line(Eigen::VectorXd::Zero(10));
  const OrthoNsDecomposition dec = orthons(z, OperatorConfig{1.5, 1e-3}, 0.5, 20);
  CHECK(dec.empty());
  CHECK(!dec.warnings.empty());
  CHECK(spectrum(dec).empty());
  CHECK(reconstruct_flow(dec, 1.0).values().norm() == 0.0);
}

TEST_CASE("pulse is dominated by its first mode") {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(128);
  v.segment(48, 32).setOnes();
  OrthoNsOptions opts;
  opts.rank = FixedRank{5};
  const OrthoNsDecomposition dec = orthons(GridSignal::line(v), OperatorConfig{1.01, 1e-3}, 0.5, 60, opts);
  check_contract(dec);
  REQUIRE(dec.rank() == 5);
  CHECK(dec.alphas[0] * dec.alphas[0] > 0.5 * sum_sq(dec.alphas));
}

TEST_CASE("posterior paths on explicit-scheme data") {
  Gen gen(72);
  const GridSignal f = gen.line(48);
  const OperatorConfig cfg{1.5, 1e-1};
  const double dt = 0.1 * std::pow(cfg.eps, 2.0 - cfg.p) / 4.0;
  const SnapshotSequence seq = evolve_fixed(f, cfg, dt, 60);
  OrthoNsOptions opts;
  opts.method = EigenvalueMethod::kFromMu;
  opts.rank = FixedRank{4};
  const OrthoNsDecomposition known = orthons_posterior(seq, cfg, opts);
  const OrthoNsDecomposition blind = orthons_posterior(seq, cfg.p, opts);
  check_contract(known);
  REQUIRE(known.rank() == blind.rank());
  CHECK((known.alphas - blind.alphas).norm() <= 1e-10 * known.alphas.norm());
  CHECK((known.mus - blind.mus).norm() <= 1e-10);
  for (Index i = 0; i < known.rank(); ++i) {
    CHECK(testing::rel_diff(known.ext_times[i], blind.ext_times[i]) <= 1e-10);
    CHECK((known.modes.col(i) - blind.modes.col(i)).norm() <= 1e-8);
  }
  REQUIRE(known.lambdas_mode.has_value());
  CHECK(!blind.lambdas_mode.has_value());
}

TEST_CASE("adaptive runs are unchanged by posterior rescaling") {
  Gen gen(73);
  const GridSignal f = gen.image(8, 8);
  const OperatorConfig cfg{1.3, 1e-2};
  const SnapshotSequence seq = evolve_adaptive(f, cfg, 0.5, 25);
  OrthoNsOptions opts;
  opts.method = EigenvalueMethod::kFromMu;
  opts.rank = FixedRank{6};
  const OrthoNsDecomposition prior = orthons(f, cfg, 0.5, 25, opts);
  const OrthoNsDecomposition post = orthons_posterior(seq, cfg, opts);
  REQUIRE(prior.rank() == post.rank());
  CHECK(post.delta == doctest::Approx(0.5).epsilon(1e-12));
  CHECK((prior.alphas - post.alphas).norm() <= 1e-8 * prior.alphas.norm());
  CHECK((prior.mus - post.mus).norm() <= 1e-8);
  for (Index i = 0; i < prior.rank(); ++i) {
    if (prior.physical[static_cast<std::size_t>(i)]) {
      CHECK(testing::rel_diff(prior.ext_times[i], post.ext_times[i]) <= 1e-8);
    }
  }
}

TEST_CASE("eigenvalue from a mode") {
  const GridSignal f = scaled_image();
  const HomogeneousOperator op = norm_power_operator(-2.0, 1.4, norm(f));
  CHECK(lambda_from_mode(f, 0.7, 0.3, op) == doctest::Approx(-2.0).epsilon(1e-13));
  CHECK(lambda_from_mode(f, 1.0, 0.3, op) == 0.0);

  const Index m = 32;
  const double h = 0.5;
  for (int k : {1, 5, 17}) {
    Eigen::VectorXd v(m);
    for (Index i = 0; i < m; ++i) v[i] = std::cos(M_PI * k * (static_cast<double>(i) + 0.5) / static_cast<double>(m));
    const double lam = -(2.0 - 2.0 * std::cos(M_PI * k / static_cast<double>(m))) / (h * h);
    CHECK(lambda_from_mode(GridSignal::line(v, h), 0.5, 0.5, OperatorConfig{2.0, 0.0}) ==
          doctest::Approx(lam).epsilon(1e-12));
  }
  const GridSignal c = GridSignal::line(Eigen::VectorXd::Ones(5));
  CHECK_THROWS_AS(lambda_from_mode(c, 0.5, 0.5, OperatorConfig{1.5, 1e-3}), UndefinedEigenvalue);
  CHECK_THROWS_AS(lambda_from_mode(f, 0.5, 0.0, op), InvalidInput);
}

TEST_CASE("eigenvalue from a decay rate") {
  for (double p : {1.0, 1.5, 1.9}) {
    const FlowParams params{-0.4, p, 1.0};
    const std::vector<double> t = adaptive_sample_times(params, 0.3, 30);
    CHECK(lambda_from_mu(0.7, t, p) == doctest::Approx(-0.4).epsilon(1e-12));
    CHECK(lambda_from_mu(1.0, t, p) == 0.0);
  }
  CHECK_THROWS_AS(lambda_from_mu(0.0, {0.0, 1.0}, 1.5), DomainError);
  CHECK_THROWS_AS(lambda_from_mu(0.5, {0.0, 0.0}, 1.5), UndefinedEigenvalue);
  CHECK_THROWS_AS(lambda_from_mu(0.5, {0.0}, 1.5), InvalidInput);
  CHECK_THROWS_AS(lambda_from_mu(0.5, {0.0, 1.0}, 2.0), DomainError);
}

TEST_CASE("property: decay-rate eigenvalue minimizes the fit error") {
  Gen gen(74);
  for (int trial = 0; trial < 20; ++trial) {
    const double p = gen.uniform(1.0, 1.9);
    const double mu = gen.uniform(0.1, 0.99);
    std::vector<double> t{0.0};
    for (int k = 0; k < 8; ++k) t.push_back(t.back() + gen.uniform(0.05, 1.0));
    const double e = 2.0 - p;
    auto fit = [&](double lam) {
      double s = 0.0;
      for (std::size_t k = 0; k < t.size(); ++k) {
        const double r = 1.0 + e * lam * t[k] - std::pow(mu, static_cast<double>(k) * e);
        s += r * r;
      }
      return s;
    };
    const double lam = lambda_from_mu(mu, t, p);
    double best = 0.0;
    double best_err = std::numeric_limits<double>::infinity();
    for (double x = lam - 1e-3; x <= lam + 1e-3; x += 1e-6) {
      const double v = fit(x);
      if (v < best_err) {
        best_err = v;
        best = x;
      }
    }
    CHECK(std::abs(best - lam) <= 1e-6);
    CHECK(fit(lam) <= best_err * (1.0 + 1e-12));
  }
}

TEST_CASE("flow reconstruction") {
  const GridSignal f = scaled_image();
  const FlowParams params{kLambda, 1.5, kNormSq};
  const SnapshotSequence seq = synth_eigenflow(f, params, AdaptiveSampling{0.5, 30});
  OrthoNsOptions opts;
  opts.method = EigenvalueMethod::kFromMu;
  const OrthoNsDecomposition dec = orthons_normalized(seq, 0.5, seq.times(), 1.5, nullptr, opts);
  CHECK((reconstruct_flow(dec, 0.0).values() - dec.projection().values()).norm() == 0.0);
  CHECK((dec.projection().values() - f.values()).norm() <= 1e-10 * norm(f));
  const double T = extinction_time(params);
  for (int j = 0; j < 20; ++j) {
    const double t = T * j / 20.0;
    const Eigen::VectorXd expect = decay_profile(t, params) * f.values();
    CHECK((reconstruct_flow(dec, t).values() - expect).norm() <= 1e-8 * norm(f));
  }
  CHECK(reconstruct_flow(dec, 1.01 * dec.ext_times.maxCoeff()).values().norm() == 0.0);
  CHECK_THROWS_AS(reconstruct_flow(dec, -1.0), InvalidInput);
}

TEST_CASE("projection at t = 0 is the least-squares fit in the mode basis") {
  Gen gen(75);
  const GridSignal f = gen.image(10, 10);
  OrthoNsOptions opts;
  opts.rank = FixedRank{6};
  const OrthoNsDecomposition dec = orthons(f, OperatorConfig{1.2, 1e-2}, 0.5, 20, opts);
  const Eigen::VectorXd c = dec.modes.colPivHouseholderQr().solve(f.values());
  CHECK((c - dec.alphas).norm() <= 1e-10 * f.values().norm());
  const double res = (f.values() - dec.projection().values()).norm();
  for (int k = 0; k < 50; ++k) {
    const Eigen::VectorXd pert = dec.alphas + 1e-3 * gen.vector(dec.rank());
    CHECK((f.values() - dec.modes * pert).norm() >= res);
  }
}

TEST_CASE("spectrum and filtering") {
  Gen gen(76);
  const GridSignal f = gen.image(12, 12);
  OrthoNsOptions opts;
  opts.rank = FixedRank{5};
  const OrthoNsDecomposition dec = orthons(f, OperatorConfig{1.5, 1e-2}, 0.5, 30, opts);
  const Index r = dec.rank();
  const auto sp = spectrum(dec);
  REQUIRE(sp.size() == static_cast<std::size_t>(r));
  double total = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    total += sp[i].second;
    if (i > 0) CHECK(sp[i].first >= sp[i - 1].first);
  }
  CHECK(testing::rel_diff(total, squared_norm(dec.projection())) <= 1e-10);

  CHECK((filter(dec, Eigen::VectorXd::Ones(r)).values() - dec.projection().values()).norm() <= 1e-14);
  const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(r, 0);
  CHECK((filter(dec, e1).values() - dec.alphas[0] * dec.modes.col(0)).norm() == 0.0);
  const Eigen::VectorXd h1 = gen.vector(r);
  const Eigen::VectorXd h2 = gen.vector(r);
  const Eigen::VectorXd sum = filter(dec, h1).values() + filter(dec, h2).values();
  CHECK((filter(dec, h1 + h2).values() - sum).norm() <= 1e-14 * sum.norm());
  CHECK_THROWS_AS(filter(dec, Eigen::VectorXd::Ones(r + 1)), InvalidInput);

  const Eigen::VectorXd all = band_indicator(dec, 0.0, std::numeric_limits<double>::infinity());
  CHECK(all == Eigen::VectorXd::Ones(r));
  CHECK(band_indicator(dec, -2.0, -1.0) == Eigen::VectorXd::Zero(r));
}

TEST_CASE("non-zero mean input yields a flagged non-decaying mode") {
  Eigen::VectorXd v = Eigen::VectorXd::Constant(64, 2.0);
  v.segment(20, 10).array() += 1.0;
  const OrthoNsDecomposition dec = orthons(GridSignal::line(v), OperatorConfig{1.5, 1e-3}, 0.5, 40);
  check_contract(dec);
  bool flagged = false;
  for (Index i = 0; i < dec.rank(); ++i) {
    if (!dec.physical[static_cast<std::size_t>(i)]) flagged = true;
  }
  CHECK(flagged);
  CHECK(!dec.warnings.empty());
}

TEST_CASE("property: decomposition contract on random inputs") {
  Gen gen(77);
  for (int trial = 0; trial < 50; ++trial) {
    const GridSignal f = gen.signal();
    const OperatorConfig cfg{gen.uniform(1.0, 1.9), gen.uniform(1e-3, 1e-1)};
    OrthoNsOptions opts;
    opts.rank = FixedRank{gen.index(1, 6)};
    opts.method = trial % 2 == 0 ? EigenvalueMethod::kFromMu : EigenvalueMethod::kFromMode;
    const OrthoNsDecomposition dec = orthons(f, cfg, gen.uniform(0.1, 0.9), 15, opts);
    check_contract(dec);
  }
}

TEST_CASE("mode-based eigenvalues need an operator") {
  const GridSignal f = scaled_image();
  const SnapshotSequence seq = synth_eigenflow(f, {kLambda, 1.5, kNormSq}, AdaptiveSampling{0.5, 5});
  OrthoNsOptions opts;
  opts.method = EigenvalueMethod::kFromMode;
  CHECK_THROWS_AS(orthons_normalized(seq, 0.5, seq.times(), 1.5, nullptr, opts), ContractError);
  CHECK_THROWS_AS(orthons_normalized(seq, 0.5, {0.0}, 1.5, nullptr), InvalidInput);
  CHECK_THROWS_AS(orthons_normalized(seq, 0.5, seq.times(), 2.0, nullptr), DomainError);
}
