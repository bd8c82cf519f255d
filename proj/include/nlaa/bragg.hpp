#pragma once

#include <vector>

#include "nlaa/model.hpp"

namespace nlaa {

/// Two-photon Bragg detunings that realize the on-site modulation in a
/// momentum-state lattice. Transition j couples momentum labels j and j+1,
/// labels run from -center to L-2-center (j = -10..9 for L = 21). All
/// quantities are dimensionless: energies in units of J, detunings in J/hbar.
struct BraggSchedule {
  std::vector<int> labels;
  std::vector<double> detunings;  // hbar dw_j = 4 (2j+1) E_R - (eps_{j+1} - eps_j)
  std::vector<double> phases;     // theta_j; pi on every link realizes J < 0
  double recoil = 0.0;            // E_R
  double wavenumber = 0.0;        // k, in units of the lattice laser (1 by default)
};

BraggSchedule bragg_detunings(const ModelParams& p, double recoil, int center = -1);

// max_j |hbar dw_j - 4(2j+1) E_R + (eps_{j+1} - eps_j)|
double bragg_design_residual(const BraggSchedule& s, const ModelParams& p, int center = -1);

}  // namespace nlaa
