#include "homoflow/bench.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <random>
#include <thread>

#include "homoflow/dmd.hpp"
#include "homoflow/error.hpp"
#include "homoflow/orthons.hpp"

namespace homoflow {
namespace {

using cd = std::complex<double>;

// 95% quantile of the chi-square distribution with two degrees of freedom.
constexpr double kChi2Quantile95 = 5.991464547107979;

struct TrialOutcome {
  bool ok = false;
  cd est[2];
};

std::vector<cd> true_roots(const Eigen::Matrix2d& A) {
  Eigen::EigenSolver<Eigen::Matrix2d> es(A, false);
  std::vector<cd> roots = {es.eigenvalues()[0], es.eigenvalues()[1]};
  std::sort(roots.begin(), roots.end(), [](cd a, cd b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

Eigen::MatrixXd clean_snapshots(const NoiseBenchConfig& cfg) {
  Eigen::MatrixXd X(2, static_cast<Index>(cfg.snapshots));
  X.col(0) = cfg.init;
  for (Index k = 1; k < X.cols(); ++k) X.col(k) = cfg.system * X.col(k - 1);
  return X;
}

TrialOutcome run_trial(const Eigen::MatrixXd& clean, double sigma,
                       std::uint64_t seed, std::size_t snr_index,
                       std::size_t trial, BenchMethod method,
                       const std::vector<cd>& roots) {
  Eigen::MatrixXd X = clean;
  if (sigma > 0.0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(snr_index),
                      static_cast<std::uint32_t>(trial)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, sigma);
    for (Index j = 0; j < X.cols(); ++j) {
      for (Index i = 0; i < X.rows(); ++i) X(i, j) += noise(rng);
    }
  }
  std::vector<GridSignal> snaps;
  snaps.reserve(static_cast<std::size_t>(X.cols()));
  for (Index j = 0; j < X.cols(); ++j) {
    snaps.push_back(GridSignal::line(X.col(j)));
  }
  TrialOutcome out;
  try {
    const SnapshotSequence s = SnapshotSequence::make_uniform(std::move(snaps), 1.0);
    const DmdResult res = method == BenchMethod::kDmd ? dmd(s, FixedRank{2})
                                                      : sdmd(s, FixedRank{2});
    if (res.rank < 2) return out;
    const cd a = res.mu[0];
    const cd b = res.mu[1];
    const double straight = std::abs(a - roots[0]) + std::abs(b - roots[1]);
    const double swapped = std::abs(b - roots[0]) + std::abs(a - roots[1]);
    out.est[0] = straight <= swapped ? a : b;
    out.est[1] = straight <= swapped ? b : a;
    out.ok = std::isfinite(out.est[0].real()) && std::isfinite(out.est[1].real());
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

RootStats summarize(const std::vector<TrialOutcome>& trials, int root,
                    cd truth) {
  RootStats st{};
  st.root = root;
  st.truth = truth;
  double sre = 0.0, sim = 0.0, err = 0.0, imag = 0.0;
  for (const auto& t : trials) {
    if (!t.ok) {
      ++st.discarded;
      continue;
    }
    const cd e = t.est[root];
    sre += e.real();
    sim += e.imag();
    err += std::abs(e - truth);
    imag = std::max(imag, std::abs(e.imag()));
    ++st.used;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (st.used == 0) {
    st.mean = cd(nan, nan);
    st.cov.setConstant(nan);
    st.ellipse_a = st.ellipse_b = st.ellipse_theta = nan;
    st.mean_abs_error = nan;
    return st;
  }
  const double n = static_cast<double>(st.used);
  st.mean = cd(sre / n, sim / n);
  st.mean_abs_error = err / n;
  st.max_abs_imag = imag;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& t : trials) {
    if (!t.ok) continue;
    const Eigen::Vector2d d(t.est[root].real() - st.mean.real(),
                            t.est[root].imag() - st.mean.imag());
    cov += d * d.transpose();
  }
  st.cov = st.used > 1 ? Eigen::Matrix2d(cov / (n - 1.0))
                       : Eigen::Matrix2d::Zero();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(st.cov);
  const Eigen::Vector2d l = es.eigenvalues().cwiseMax(0.0);
  st.ellipse_a = std::sqrt(kChi2Quantile95 * l[1]);
  st.ellipse_b = std::sqrt(kChi2Quantile95 * l[0]);
  const Eigen::Vector2d major = es.eigenvectors().col(1);
  st.ellipse_theta = std::atan2(major[1], major[0]);
  return st;
}

}  // namespace

std::string to_string(BenchMethod m) {
  return m == BenchMethod::kDmd ? "dmd" : "sdmd";
}

void NoiseBenchConfig::validate() const {
  if (trials < 1) throw InvalidInput("NoiseBenchConfig: trials must be >= 1");
  if (snapshots < 3) {
    throw InvalidInput("NoiseBenchConfig: snapshots must be >= 3");
  }
  if (!system.allFinite() || !init.allFinite()) {
    throw InvalidInput("NoiseBenchConfig: system and init must be finite");
  }
  if (snr_db.empty()) throw InvalidInput("NoiseBenchConfig: no SNR values");
  for (double s : snr_db) {
    if (std::isnan(s) || s == -std::numeric_limits<double>::infinity()) {
      throw InvalidInput("NoiseBenchConfig: SNR values must be > -inf");
    }
  }
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HOMOFLOW_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

NoiseBenchResult noise_benchmark(const NoiseBenchConfig& cfg,
                                 const std::vector<BenchMethod>& methods) {
  cfg.validate();
  NoiseBenchResult result;
  result.roots = true_roots(cfg.system);
  const Eigen::MatrixXd clean = clean_snapshots(cfg);
  const double power = clean.squaredNorm() / static_cast<double>(clean.size());
  const unsigned threads = resolve_threads(cfg.threads);

  for (BenchMethod method : methods) {
    for (std::size_t s = 0; s < cfg.snr_db.size(); ++s) {
      const double snr = cfg.snr_db[s];
      const double sigma =
          std::isinf(snr) ? 0.0 : std::sqrt(power / std::pow(10.0, snr / 10.0));
      std::vector<TrialOutcome> trials(cfg.trials);
      parallel_for(cfg.trials, threads, [&](std::size_t i) {
        trials[i] = run_trial(clean, sigma, cfg.seed, s, i, method, result.roots);
      });
      for (int root = 0; root < 2; ++root) {
        RootStats st = summarize(trials, root, result.roots[root]);
        st.method = method;
        st.snr_db = snr;
        result.stats.push_back(st);
      }
    }
  }
  return result;
}

void write_noise_csv(std::ostream& out, const NoiseBenchResult& result) {
  const auto old_precision = out.precision(17);
  out << kNoiseCsvHeader << '\n';
  for (const auto& st : result.stats) {
    out << to_string(st.method) << ',' << st.snr_db << ',' << st.root << ','
        << st.mean.real() << ',' << st.mean.imag() << ',' << st.cov(0, 0)
        << ',' << st.cov(0, 1) << ',' << st.cov(1, 1) << ',' << st.ellipse_a
        << ',' << st.ellipse_b << ',' << st.ellipse_theta << '\n';
  }
  out.precision(old_precision);
}

TimingResult timing_sweep(const std::vector<Index>& sizes,
                          const TimingConfig& cfg) {
  TimingResult result;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (Index size : sizes) {
    if (size <= 0) throw InvalidInput("timing_sweep: sizes must be positive");
    const Index side = std::max<Index>(
        2, static_cast<Index>(std::lround(std::sqrt(static_cast<double>(size)))));
    Eigen::VectorXd values(side * side);
    const double c = 0.5 * static_cast<double>(side - 1);
    const double radius = 0.3 * static_cast<double>(side);
    for (Index r = 0; r < side; ++r) {
      for (Index q = 0; q < side; ++q) {
        const double d = std::hypot(static_cast<double>(r) - c,
                                    static_cast<double>(q) - c);
        values[r * side + q] = (d <= radius ? 1.0 : 0.0) + noise(rng);
      }
    }
    const GridSignal f = GridSignal::image(side, side, values);
    OrthoNsOptions opts;
    opts.rank = FixedRank{cfg.rank};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t rep = 0; rep < std::max<std::size_t>(1, cfg.repeats); ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const OrthoNsDecomposition dec = orthons(f, cfg.op, cfg.delta, cfg.steps, opts);
      const auto t1 = std::chrono::steady_clock::now();
      (void)dec;
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    result.points.push_back({side * side, best});
  }
  if (result.points.size() >= 2) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(result.points.size());
    for (const auto& pt : result.points) {
      const double x = std::log(static_cast<double>(pt.size));
      const double y = std::log(std::max(pt.seconds, 1e-12));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    result.exponent = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  }
  return result;
}

void write_timing_csv(std::ostream& out, const TimingResult& result) {
  const auto old_precision = out.precision(17);
  out << kTimingCsvHeader << '\n';
  for (const auto& pt : result.points) out << pt.size << ',' << pt.seconds << '\n';
  out.precision(old_precision);
}

}  // namespace homoflow
