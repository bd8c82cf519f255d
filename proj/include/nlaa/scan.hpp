#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nlaa/dynamics.hpp"
#include "nlaa/eigensolve.hpp"
#include "nlaa/model.hpp"

namespace nlaa {

/// r of the noninteracting ground state at Delta/J = 2 for size L. Results are
/// cached per (L, phi, beta); safe to call from several threads.
double critical_r(int L, double phi = 0.0, double beta = kGoldenConjugate);

enum class Preparation { exact, ramped };
std::string to_string(Preparation p);
Preparation preparation_from_string(const std::string& s);

/// How a state is produced at a single (Delta, U) point.
struct CellRecipe {
  int L = 21;
  double phi = 0.0;
  double beta = kGoldenConjugate;
  StateKind kind = StateKind::ground;
  Preparation preparation = Preparation::exact;
  SolverOptions solver{};
  RampProtocol ramp{};
  EvolveOptions evolve{};

  ModelParams params(double delta, double U) const;
};

struct CellValue {
  double r = 0.0;
  double mu = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  bool valid = true;
};

struct PreparedState {
  LatticeState state;
  double mu = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  bool converged = true;  // ramped states are always "converged"
};
PreparedState prepare_state(const CellRecipe& recipe, double delta, double U);

// Never throws on solver trouble: failures come back with valid = false.
CellValue evaluate_cell(const CellRecipe& recipe, double delta, double U);

struct Transition {
  enum class Status { found, above_window, below_window, invalid };
  Status status = Status::invalid;
  double delta_c = 0.0;              // first downward crossing, when found
  std::vector<double> crossings;     // every downward crossing, refined
  double window_lo = 0.0, window_hi = 0.0;

  bool found() const { return status == Status::found; }
  // Crossing, or +/-inf when r stays above/below r_c over the whole window.
  double effective() const;
  std::string describe() const;
};

/// Locates downward crossings of r through rc on a sampled curve. Each bracket
/// [d_i, d_{i+1}] with r_i > rc >= r_{i+1} is bisected with `resolve` until its
/// width is below tol; the reported point is the bracket midpoint. Samples whose
/// r is NaN are skipped.
Transition detect_transition(const std::vector<double>& deltas, const std::vector<double>& r, double rc,
                             const std::function<double(double)>& resolve, double tol = 1e-3);

/// Convenience: sample `recipe` on `deltas` at fixed U and detect.
Transition find_transition(const CellRecipe& recipe, double U, const std::vector<double>& deltas,
                           double rc, double tol = 1e-3);

struct ScanGrid {
  std::vector<double> delta_over_j;
  std::vector<double> u_over_j;
  CellRecipe recipe{};

  void validate() const;
};

struct ScanOptions {
  int workers = 1;
  double bisection_tol = 1e-3;
  bool refine_transitions = true;
  std::optional<std::filesystem::path> store;  // JSON-lines cell store for resumable scans
};

struct ScanResult {
  ScanGrid grid;
  double r_c = 0.0;
  std::vector<std::vector<CellValue>> cells;  // [u index][delta index]
  std::vector<Transition> transitions;        // one per U
  int reused_cells = 0;
};

ScanResult scan_phase_diagram(const ScanGrid& grid, const ScanOptions& opts = {});

std::vector<double> linspace_step(double lo, double hi, double step);

enum class Phase { I, II, III, IV };
std::string to_string(Phase p);

/// II above both boundaries, IV below both. Between them: I for U < 0 (low-energy
/// states extended), III for U > 0. At U = 0 the curve order decides.
Phase classify_phase(double delta_over_j, double u_over_j, double delta_c_gs, double delta_c_es);

// Rows U/J, columns Delta/J, values r.
void write_r_matrix_csv(std::ostream& os, const ScanResult& res);
// kind, U/J, status, Delta_c/J, crossings (';'-separated), r_c
void write_transitions_csv(std::ostream& os, const std::vector<ScanResult>& results);

}  // namespace nlaa
