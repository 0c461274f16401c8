#pragma once

#include <functional>

#include "homoflow/grid_signal.hpp"

namespace homoflow {

/// Parameters of the discrete p-Dirichlet energy and its p-Laplacian.
///
/// The gradient magnitude is regularized as sqrt(|grad psi|^2 + eps^2). With
/// eps = 0 and a vanishing gradient the flux |grad psi|^{p-2} grad psi is
/// defined as zero. p = 2 is accepted and gives the linear Laplacian.
struct OperatorConfig {
  double p = 1.5;
  double eps = 1e-8;

  void validate() const;
};

/// (1/p) * sum over cells of [(|grad psi|^2 + eps^2)^{p/2} - eps^p] * h^d.
/// Forward differences, Neumann boundary (zero gradient past the last cell).
/// Subtracting eps^p keeps the energy of a constant signal at exactly zero.
double p_dirichlet_energy(const GridSignal& psi, const OperatorConfig& cfg);

/// div(|grad psi|^{p-2} grad psi) with forward-difference gradient and the
/// adjoint backward-difference divergence, so that
///   d/ds energy(psi + s v) = -h^d <p_laplacian(psi), v>.
GridSignal p_laplacian(const GridSignal& psi, const OperatorConfig& cfg);

/// lambda_psi^{-1} = -<P(psi), psi> / ||P(psi)||^2.
/// Throws SteadyStateError when P(psi) is identically zero.
double rayleigh_step_factor(const GridSignal& p_psi, const GridSignal& psi);

/// A (p-1)-homogeneous operator P = -dR for an absolutely p-homogeneous R.
struct HomogeneousOperator {
  double p = 1.5;
  std::function<GridSignal(const GridSignal&)> apply;

  GridSignal operator()(const GridSignal& psi) const { return apply(psi); }
};

HomogeneousOperator p_laplacian_operator(const OperatorConfig& cfg);

/// P(psi) = lambda * (||psi|| / ||f||)^{p-2} * psi, the negative gradient of
/// R(psi) = -lambda ||f||^{2-p} ||psi||^p / p. Every nonzero signal is an
/// eigenfunction; f itself has eigenvalue lambda. Used to produce exactly
/// separable flows through the explicit schemes.
HomogeneousOperator norm_power_operator(double lambda, double p,
                                        double f_norm);

}  // namespace homoflow
