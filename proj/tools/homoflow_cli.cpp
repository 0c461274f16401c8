#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "homoflow/analytic.hpp"
#include "homoflow/bench.hpp"
#include "homoflow/error.hpp"
#include "homoflow/flow.hpp"
#include "homoflow/io.hpp"
#include "homoflow/orthons.hpp"

namespace fs = std::filesystem;
using namespace homoflow;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitNonDissipative = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void warn(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

double parse_bound(const std::string& s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("--keep-T: not a number: " + s);
  }
  if (pos != s.size()) throw UsageError("--keep-T: not a number: " + s);
  return v;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << std::setprecision(17);
  return out;
}

// flow ---------------------------------------------------------------------

struct FlowArgs {
  std::string input, out;
  double p = 1.5, eps = 1e-8, spacing = 1.0;
  std::optional<double> delta, dt;
  std::size_t steps = 100;
};

void add_flow(CLI::App& app, FlowArgs& a) {
  auto* cmd = app.add_subcommand("flow", "Evolve a signal under the p-Laplacian flow");
  cmd->add_option("--input", a.input, "Initial signal (.csv or .pgm)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--p", a.p, "Homogeneity exponent in [1, 2]")->capture_default_str();
  cmd->add_option("--eps", a.eps, "Gradient regularization")->capture_default_str();
  cmd->add_option("--spacing", a.spacing, "Grid spacing h")->capture_default_str();
  auto* delta = cmd->add_option("--delta", a.delta, "Adaptive step factor in (0, 2)");
  auto* dt = cmd->add_option("--dt", a.dt, "Fixed time step");
  delta->excludes(dt);
  dt->excludes(delta);
  cmd->add_option("--steps", a.steps, "Number of steps")->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->required();
}

int run_flow(const FlowArgs& a) {
  if (a.delta.has_value() == a.dt.has_value()) {
    throw UsageError("flow: give exactly one of --delta or --dt");
  }
  const GridSignal f = io::read_signal(a.input, a.spacing);
  const OperatorConfig cfg{a.p, a.eps};
  cfg.validate();
  const SnapshotSequence seq = a.delta ? evolve_adaptive(f, cfg, *a.delta, a.steps)
                                       : evolve_fixed(f, cfg, *a.dt, a.steps);
  if (squared_norm(p_laplacian(f, cfg)) == 0.0) {
    warn("input is a steady state of the flow; snapshots are identical");
  } else if (seq.stopped_early) {
    warn("flow reached a steady state after " + std::to_string(seq.steps()) +
         " steps");
  }
  io::write_snapshots(a.out, seq);
  std::cout << "wrote " << seq.size() << " snapshots to " << a.out << '\n';
  return 0;
}

// decompose ----------------------------------------------------------------

struct DecomposeArgs {
  std::string input, snapshots, out, mode = "prior", method = "auto";
  double p = 1.5, eps = 1e-8, delta = kDefaultDelta, spacing = 1.0;
  std::optional<Index> rank;
  std::optional<double> tol;
  std::size_t steps = 100, samples = 0;
  bool clamp = false;
};

void add_decompose(CLI::App& app, DecomposeArgs& a) {
  auto* cmd = app.add_subcommand("decompose", "Orthogonal nonlinear spectral decomposition");
  auto* in = cmd->add_option("--input", a.input, "Initial signal (prior mode)")
                 ->check(CLI::ExistingFile);
  auto* sn = cmd->add_option("--snapshots", a.snapshots,
                             "Snapshot directory (posterior and blind modes)")
                 ->check(CLI::ExistingDirectory);
  in->excludes(sn);
  sn->excludes(in);
  cmd->add_option("--p", a.p, "Homogeneity exponent")->capture_default_str();
  cmd->add_option("--eps", a.eps, "Gradient regularization")->capture_default_str();
  cmd->add_option("--spacing", a.spacing, "Grid spacing h")->capture_default_str();
  cmd->add_option("--mode", a.mode, "prior | posterior | blind")
      ->check(CLI::IsMember({"prior", "posterior", "blind"}))
      ->capture_default_str();
  auto* rank = cmd->add_option("--rank", a.rank, "Number of modes");
  auto* tol = cmd->add_option("--tol", a.tol, "Relative singular value cutoff");
  rank->excludes(tol);
  tol->excludes(rank);
  cmd->add_option("--delta", a.delta, "Adaptive step factor (prior mode)")
      ->capture_default_str();
  cmd->add_option("--steps", a.steps, "Flow steps (prior mode)")->capture_default_str();
  cmd->add_option("--samples", a.samples,
                  "Uniform samples after rescaling (0 = as many as snapshots)")
      ->capture_default_str();
  cmd->add_option("--method", a.method, "Eigenvalue estimate: auto | mu | mode")
      ->check(CLI::IsMember({"auto", "mu", "mode"}))
      ->capture_default_str();
  cmd->add_flag("--clamp", a.clamp, "Clamp non-dissipative steps instead of failing");
  cmd->add_option("--out", a.out, "Output JSON file")->required();
}

int run_decompose(const DecomposeArgs& a) {
  OrthoNsOptions opts;
  if (a.rank) {
    opts.rank = FixedRank{*a.rank};
  } else {
    opts.rank = RelativeThreshold{a.tol.value_or(kDefaultRankTolerance)};
  }
  opts.method = a.method == "mode" ? EigenvalueMethod::kFromMode
                 : a.method == "mu" ? EigenvalueMethod::kFromMu
                                    : EigenvalueMethod::kAuto;
  opts.samples = a.samples;
  opts.policy = a.clamp ? NonDissipativePolicy::kClamp : NonDissipativePolicy::kError;
  const OperatorConfig cfg{a.p, a.eps};

  OrthoNsDecomposition dec;
  if (a.mode == "prior") {
    if (a.input.empty()) throw UsageError("decompose: prior mode needs --input");
    dec = orthons(io::read_signal(a.input, a.spacing), cfg, a.delta, a.steps, opts);
  } else {
    if (a.snapshots.empty()) {
      throw UsageError("decompose: " + a.mode + " mode needs --snapshots");
    }
    const io::LoadedSnapshots loaded = io::read_snapshots(a.snapshots);
    if (a.mode == "posterior") {
      if (!loaded.has_times) {
        throw UsageError("decompose: posterior mode needs times.csv in " + a.snapshots);
      }
      dec = orthons_posterior(loaded.seq, cfg, opts);
    } else {
      if (opts.method == EigenvalueMethod::kFromMode) {
        throw UsageError("decompose: --method mode needs an operator (not blind)");
      }
      if (!loaded.has_times) {
        warn("no times.csv; assuming unit steps for the eigenvalue fit");
      }
      dec = orthons_posterior(loaded.seq, a.p, opts);
    }
  }
  for (const auto& w : dec.warnings) warn(w);
  io::write_decomposition(a.out, dec);
  std::cout << "wrote " << dec.rank() << " modes to " << a.out << '\n';
  return 0;
}

// filter -------------------------------------------------------------------

struct FilterArgs {
  std::string dec, keep, h, out;
};

void add_filter(CLI::App& app, FilterArgs& a) {
  auto* cmd = app.add_subcommand("filter", "Spectral filtering of a decomposition");
  cmd->set_help_flag("--help", "Print this help message and exit");
  cmd->add_option("--dec", a.dec, "Decomposition JSON")->required()->check(CLI::ExistingFile);
  auto* keep = cmd->add_option("--keep-T", a.keep, "Keep modes with T in MIN:MAX");
  auto* h = cmd->add_option("--h", a.h, "Per-mode gains, one per line")
                ->check(CLI::ExistingFile);
  keep->excludes(h);
  h->excludes(keep);
  cmd->add_option("--out", a.out, "Output signal (.csv, or .pgm for images)")->required();
}

int run_filter(const FilterArgs& a) {
  const OrthoNsDecomposition dec = io::read_decomposition(a.dec);
  Eigen::VectorXd gains;
  if (!a.keep.empty()) {
    const auto colon = a.keep.find(':');
    if (colon == std::string::npos) throw UsageError("--keep-T expects MIN:MAX");
    gains = band_indicator(dec, parse_bound(a.keep.substr(0, colon)),
                           parse_bound(a.keep.substr(colon + 1)));
    if (gains.sum() == 0.0) warn("no mode falls in the band; output is zero");
  } else if (!a.h.empty()) {
    const std::vector<double> h = io::read_column(a.h);
    gains = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Index>(h.size()));
  } else {
    throw UsageError("filter: give --keep-T or --h");
  }
  io::write_signal(a.out, filter(dec, gains));
  return 0;
}

// paradox ------------------------------------------------------------------

struct ParadoxArgs {
  double p = 1.0, lambda = -1.0, f_norm_sq = 1.0;
  std::size_t levels = 8, base = 50, nodes = kDefaultQuadratureNodes;
  std::string out;
};

void add_paradox(CLI::App& app, ParadoxArgs& a) {
  auto* cmd = app.add_subcommand("paradox", "DMD error vs. reconstruction error under refinement");
  cmd->add_option("--p", a.p, "Homogeneity exponent in [1, 2)")->capture_default_str();
  cmd->add_option("--lambda", a.lambda, "Eigenvalue (< 0)")->capture_default_str();
  cmd->add_option("--f-norm-sq", a.f_norm_sq, "||f||^2")->capture_default_str();
  cmd->add_option("--levels", a.levels, "Number of dyadic refinements")->capture_default_str();
  cmd->add_option("--base", a.base, "Samples per extinction time at level 0")
      ->capture_default_str();
  cmd->add_option("--nodes", a.nodes, "Quadrature nodes")->capture_default_str();
  cmd->add_option("--out", a.out, "Output CSV")->required();
}

int run_paradox(const ParadoxArgs& a) {
  if (!(a.lambda < 0.0)) throw UsageError("paradox: --lambda must be negative");
  const auto rows =
      paradox_sweep(FlowParams{a.lambda, a.p, a.f_norm_sq}, a.levels, a.base, a.nodes);
  std::ofstream out = open_csv(a.out);
  out << "dt,err_dmd,err_rec_c,bound,mu_tilde\n";
  for (const auto& r : rows) {
    out << r.dt << ',' << r.err_dmd << ',' << r.err_rec_c << ',' << r.bound << ','
        << r.mu_tilde << '\n';
  }
  return 0;
}

// bench --------------------------------------------------------------------

struct BenchNoiseArgs {
  std::size_t trials = 1000, snapshots = 8;
  std::uint64_t seed = 42;
  std::vector<double> snr = {-4.0, -2.0, 0.0, 2.0, 4.0};
  std::vector<std::string> methods = {"dmd", "sdmd"};
  unsigned threads = 0;
  std::string out;
};

void add_bench_noise(CLI::App& app, BenchNoiseArgs& a) {
  auto* cmd = app.add_subcommand("bench-noise", "Eigenvalue recovery under white noise");
  cmd->add_option("--trials", a.trials, "Trials per SNR")->capture_default_str();
  cmd->add_option("--snapshots", a.snapshots, "Snapshots per trial")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_option("--snr", a.snr, "SNR values in dB (inf = noiseless)")->delimiter(',');
  cmd->add_option("--methods", a.methods, "dmd,sdmd")
      ->delimiter(',')
      ->check(CLI::IsMember({"dmd", "sdmd"}));
  cmd->add_option("--threads", a.threads, "Worker threads (0 = auto)")->capture_default_str();
  cmd->add_option("--out", a.out, "Output CSV")->required();
}

int run_bench_noise(const BenchNoiseArgs& a) {
  NoiseBenchConfig cfg;
  cfg.trials = a.trials;
  cfg.snapshots = a.snapshots;
  cfg.seed = a.seed;
  cfg.snr_db = a.snr;
  cfg.threads = a.threads;
  std::vector<BenchMethod> methods;
  for (const auto& m : a.methods) {
    methods.push_back(m == "dmd" ? BenchMethod::kDmd : BenchMethod::kSdmd);
  }
  const NoiseBenchResult res = noise_benchmark(cfg, methods);
  std::ofstream out = open_csv(a.out);
  write_noise_csv(out, res);
  for (const auto& st : res.stats) {
    if (st.discarded > 0) {
      warn(to_string(st.method) + " at " + std::to_string(st.snr_db) + " dB: " +
           std::to_string(st.discarded) + " degenerate trials discarded");
    }
  }
  return 0;
}

struct BenchTimeArgs {
  std::vector<Index> sizes = {1024, 4096, 16384};
  double p = 1.5, eps = 1e-3, delta = kDefaultDelta;
  std::size_t steps = 50, repeats = 1;
  Index rank = 10;
  std::uint64_t seed = 42;
  std::string out;
};

void add_bench_time(CLI::App& app, BenchTimeArgs& a) {
  auto* cmd = app.add_subcommand("bench-time", "Decomposition time versus image size");
  cmd->add_option("--sizes", a.sizes, "Pixel counts")->delimiter(',');
  cmd->add_option("--p", a.p, "Homogeneity exponent")->capture_default_str();
  cmd->add_option("--eps", a.eps, "Gradient regularization")->capture_default_str();
  cmd->add_option("--delta", a.delta, "Adaptive step factor")->capture_default_str();
  cmd->add_option("--steps", a.steps, "Flow steps")->capture_default_str();
  cmd->add_option("--rank", a.rank, "Number of modes")->capture_default_str();
  cmd->add_option("--repeats", a.repeats, "Repeats per size (fastest kept)")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", a.out, "Output CSV")->required();
}

int run_bench_time(const BenchTimeArgs& a) {
  TimingConfig cfg;
  cfg.op = OperatorConfig{a.p, a.eps};
  cfg.delta = a.delta;
  cfg.steps = a.steps;
  cfg.rank = a.rank;
  cfg.seed = a.seed;
  cfg.repeats = a.repeats;
  const TimingResult res = timing_sweep(a.sizes, cfg);
  std::ofstream out = open_csv(a.out);
  write_timing_csv(out, res);
  std::cout << "log-log slope: " << res.exponent << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homogeneous flow spectral decomposition"};
  app.require_subcommand(1);
  FlowArgs flow_args;
  DecomposeArgs dec_args;
  FilterArgs filter_args;
  ParadoxArgs paradox_args;
  BenchNoiseArgs noise_args;
  BenchTimeArgs time_args;
  add_flow(app, flow_args);
  add_decompose(app, dec_args);
  add_filter(app, filter_args);
  add_paradox(app, paradox_args);
  add_bench_noise(app, noise_args);
  add_bench_time(app, time_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "flow") return run_flow(flow_args);
    if (name == "decompose") return run_decompose(dec_args);
    if (name == "filter") return run_filter(filter_args);
    if (name == "paradox") return run_paradox(paradox_args);
    if (name == "bench-noise") return run_bench_noise(noise_args);
    if (name == "bench-time") return run_bench_time(time_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "error: diverged at step " << e.step() << ": " << e.what() << '\n';
    return kExitDivergence;
  } catch (const NonDissipativeError& e) {
    std::cerr << "error: non-dissipative step at index " << e.index() << ": "
              << e.what() << '\n';
    return kExitNonDissipative;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
