#pragma once

#include <span>
#include <string>
#include <vector>

#include "nlaa/model.hpp"

namespace nlaa {

enum class StateKind { ground, highest_excited };

std::string to_string(StateKind kind);
StateKind state_kind_from_string(const std::string& s);

struct SolverOptions {
  double residual_tol = 1e-10;
  int max_iterations = 50000;
  double imag_time_step = 0.05;
  double mixing = 0.3;
  // Imaginary-time stage hands over to density-mixing refinement below this residual.
  double handoff_residual = 1e-4;
  int max_refine_iterations = 300;
  bool record_energy_trace = false;

  void validate() const;
};

/// Full spectrum of the real symmetric tridiagonal matrix with diagonal
/// `potential` and off-diagonal J. Eigenvalues ascending; each eigenvector is
/// normalized with its largest-magnitude component positive.
struct Spectrum {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};
Spectrum linear_spectrum(double J, std::span<const double> potential);

/// Lowest eigenvector of the linear chain. If the lowest level is degenerate
/// within 1e-9, the subspace is projected onto the site of lowest on-site
/// energy (ties: lower index) to pick a deterministic vector.
std::vector<double> linear_ground_vector(double J, std::span<const double> potential);

struct EigenSolution {
  LatticeState state;
  double mu = 0.0;
  double energy = 0.0;
  double residual = 0.0;  // ||H[phi] phi - mu phi||_inf
  int iterations = 0;
  bool converged = false;
  StateKind kind = StateKind::ground;
  std::vector<double> energy_trace;  // accepted imaginary-time steps, if requested
};

double residual(const ModelParams& p, const LatticeState& state, double mu);

/// Ground state of the nonlinear chain: normalized imaginary-time gradient flow
/// started from the U = 0 ground state, then self-consistent refinement with
/// linear mixing on the density. Returns the best iterate with converged = false
/// if max_iterations is exhausted; throws NumericalError on NaN.
EigenSolution nonlinear_ground_state(const ModelParams& p, const SolverOptions& opts = {});

/// Highest excited state, computed as the ground state of the negated
/// Hamiltonian (-J, -Delta, -U). mu and energy are reported for the original H.
EigenSolution nonlinear_excited_state(const ModelParams& p, const SolverOptions& opts = {});

EigenSolution solve_state(const ModelParams& p, StateKind kind, const SolverOptions& opts = {});

}  // namespace nlaa
