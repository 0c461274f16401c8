#pragma once

#include <cstddef>
#include <vector>

#include "homoflow/flow.hpp"

namespace homoflow {

/// Closed-form rank-1 DMD of separable data psi_k = a_k f.
struct Rank1Dmd {
  double mu;         // <a_1^N, a_0^{N-1}> / ||a_0^{N-1}||^2
  double phi_scale;  // mode = phi_scale * f = f / ||f||
  double alpha;      // ||f||
  double err_dmd;    // ||f||^2 (||a_1^N||^2 - <a_1^N, a_0^{N-1}>^2 / ||a_0^{N-1}||^2)
};

/// `a` holds a_0..a_N with a_0 = 1.
Rank1Dmd analytic_dmd_rank1(const std::vector<double>& a, double f_norm);

/// Continuous-time DMD rate in the dense-sampling limit: lambda (4-p) / 2.
/// p = 2 is accepted and returns lambda.
double limit_mu_tilde(double lambda, double p);

/// Lower bound on the continuous reconstruction error of exponential DMD
/// fits to a separable homogeneous flow:
///   B = -||f||^2 / (lambda (4-p)) * [1 - sqrt(1 - exp(-(4-p)/(2-p)))]^2.
double paradox_bound(double f_norm_sq, double lambda, double p);

inline constexpr std::size_t kDefaultQuadratureNodes = 100000;

/// ||f||^2 * int_0^T (a(t) - exp(mu_tilde t))^2 dt by the composite trapezoid
/// rule on `nodes` equispaced points (nodes >= 1000), T the extinction time.
double err_rec_continuous(const FlowParams& params, double mu_tilde,
                          std::size_t nodes = kDefaultQuadratureNodes);

struct ParadoxRow {
  double dt;
  double err_dmd;
  double err_rec_c;
  double bound;
  double mu_tilde;  // ln(mu) / dt of the rank-1 DMD
};

/// Rank-1 DMD of the analytic decay sampled uniformly on [0, T] with
/// dt = T / (base_divisions * 2^level), level = 0..levels-1.
std::vector<ParadoxRow> paradox_sweep(const FlowParams& params,
                                      std::size_t levels,
                                      std::size_t base_divisions = 50,
                                      std::size_t nodes = kDefaultQuadratureNodes);

}  // namespace homoflow
