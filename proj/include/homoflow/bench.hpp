#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "homoflow/operators.hpp"

namespace homoflow {

enum class BenchMethod { kDmd, kSdmd };

std::string to_string(BenchMethod m);

/// Monte-Carlo eigenvalue recovery on psi_{k+1} = A psi_k with additive white
/// Gaussian noise. SNR (dB) is 10 log10(mean squared entry of the clean
/// snapshots / noise variance); +inf means noiseless.
struct NoiseBenchConfig {
  Eigen::Matrix2d system = (Eigen::Matrix2d() << 0.1, 0.6, 0.6, 0.1).finished();
  Eigen::Vector2d init = Eigen::Vector2d(1.0, 0.0);
  std::size_t snapshots = 8;
  std::vector<double> snr_db = {-4.0, -2.0, 0.0, 2.0, 4.0};
  std::size_t trials = 1000;
  std::uint64_t seed = 42;
  /// Worker threads; 0 reads HOMOFLOW_THREADS and falls back to the hardware.
  unsigned threads = 0;

  void validate() const;
};

/// Statistics of the estimates matched to one true root.
struct RootStats {
  BenchMethod method;
  double snr_db;
  int root;                   // index into the sorted true roots
  std::complex<double> truth;
  std::complex<double> mean;
  Eigen::Matrix2d cov;        // of (re, im), unbiased
  double ellipse_a;           // semi-axes of the 95% confidence ellipse
  double ellipse_b;
  double ellipse_theta;       // angle of the major axis, radians
  double mean_abs_error;      // mean |estimate - truth|
  double max_abs_imag;
  std::size_t used;
  std::size_t discarded;
};

struct NoiseBenchResult {
  std::vector<std::complex<double>> roots;  // true roots, sorted by real part
  std::vector<RootStats> stats;
};

NoiseBenchResult noise_benchmark(const NoiseBenchConfig& cfg,
                                 const std::vector<BenchMethod>& methods);

inline constexpr const char* kNoiseCsvHeader =
    "method,snr_db,root,mean_re,mean_im,cov_xx,cov_xy,cov_yy,ellipse_a,"
    "ellipse_b,ellipse_theta";

void write_noise_csv(std::ostream& out, const NoiseBenchResult& result);

/// Effective worker count: explicit request, else HOMOFLOW_THREADS, else
/// hardware concurrency.
unsigned resolve_threads(unsigned requested);

struct TimingConfig {
  OperatorConfig op{1.5, 1e-3};
  double delta = 0.5;
  std::size_t steps = 50;
  Index rank = 10;
  std::uint64_t seed = 42;
  std::size_t repeats = 1;
};

struct TimingPoint {
  Index size;  // pixels actually used (side^2)
  double seconds;
};

struct TimingResult {
  std::vector<TimingPoint> points;
  /// Least-squares slope of log(seconds) against log(size).
  double exponent = 0.0;
};

/// Runs the full decomposition on a synthetic square image per requested
/// pixel count (side = round(sqrt(size))). Reports the fastest repeat.
TimingResult timing_sweep(const std::vector<Index>& sizes,
                          const TimingConfig& cfg);

inline constexpr const char* kTimingCsvHeader = "size,seconds";

void write_timing_csv(std::ostream& out, const TimingResult& result);

}  // namespace homoflow
