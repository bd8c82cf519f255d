#pragma once

#include <numbers>
#include <ostream>
#include <vector>

#include "nlaa/eigensolve.hpp"
#include "nlaa/model.hpp"

namespace nlaa {

struct Snapshot {
  double t = 0.0;
  std::vector<double> density;
  double r = 0.0;
  double width = 0.0;  // <d>
  double energy = 0.0;
  double norm_drift = 0.0;  // |sum n - 1|
};

struct Trajectory {
  std::vector<Snapshot> frames;
  LatticeState final_state;
  double max_norm_drift = 0.0;
  double max_energy_drift = 0.0;  // only meaningful for time-independent J
};

struct EvolveOptions {
  double dt = 1e-3;
  int snapshot_stride = 100;
  double abort_drift = 1e-6;
  bool keep_density = true;

  void validate() const;
};

/// Integrates i d/dt phi = H[phi] phi with classic RK4 at fixed dt. The norm is
/// audited every step and never re-projected; drift beyond abort_drift throws
/// NumericalError. Snapshots at t = 0, every stride steps, and t_final.
Trajectory evolve(const ModelParams& p, const LatticeState& initial, double t_final,
                  const EvolveOptions& opts = {});

/// Quench transport: population starts on the center site.
Trajectory transport_experiment(const ModelParams& p, double t_final,
                                const EvolveOptions& opts = {});

/// Linear ramp J(t) = J_target * t / duration, then an optional hold at J_target.
/// Times in hbar/J_target. The defaults reproduce a 275 Hz/ms ramp to
/// J/h = 275 Hz, which takes 1 ms = 2 pi * 0.275 hbar/J.
struct RampProtocol {
  double duration = 2.0 * std::numbers::pi * 0.275;
  double hold = 0.0;
  StateKind target = StateKind::ground;

  double velocity() const { return 1.0 / duration; }  // dJ/dt in J^2/hbar
  void validate() const;
};

struct RampResult {
  LatticeState state;
  Trajectory trajectory;
  int initial_site = 0;
};

/// Starts from the J = 0 ground state (site minimizing eps_j; for the highest
/// excited target, the site minimizing -eps_j) and ramps the hopping up with
/// Delta and U held at their target values. The hopping on each step is frozen
/// at its value at the step midpoint.
RampResult ramp_prepare(const ModelParams& target, const RampProtocol& protocol,
                        const EvolveOptions& opts = {});

// t, n_0..n_{L-1}, r, d, E, norm_drift
void write_trajectory_csv(std::ostream& os, const Trajectory& tr);

}  // namespace nlaa
