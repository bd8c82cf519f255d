#pragma once

#include <numbers>

namespace nlaa {

namespace si {
inline constexpr double kPlanck = 6.62607015e-34;  // J s
inline constexpr double kHbar = kPlanck / (2.0 * std::numbers::pi);
inline constexpr double kBohrRadius = 5.29177210903e-11;  // m
inline constexpr double kCs133Mass = 2.2069e-25;          // kg
}  // namespace si

/// Maps between the dimensionless lattice units used everywhere inside the
/// library (hbar = 1, energies in units of J, times in hbar/J) and laboratory
/// units. The reference coupling is given as a frequency: J = h * coupling_hz,
/// i.e. J/hbar = 2 pi * coupling_hz.
struct UnitSystem {
  double coupling_hz = 275.0;

  double energy_unit_joule() const { return si::kPlanck * coupling_hz; }
  double time_unit_ms() const { return 1e3 / (2.0 * std::numbers::pi * coupling_hz); }

  double energy_from_hz(double nu_hz) const { return nu_hz / coupling_hz; }
  double energy_to_hz(double e) const { return e * coupling_hz; }
  double energy_from_joule(double e_joule) const { return e_joule / energy_unit_joule(); }
  double energy_to_joule(double e) const { return e * energy_unit_joule(); }

  double time_from_ms(double t_ms) const { return t_ms / time_unit_ms(); }
  double time_to_ms(double t) const { return t * time_unit_ms(); }

  // Angular frequency (rad/s) <-> dimensionless rate in units of J/hbar.
  double rate_from_angular(double omega) const {
    return omega / (2.0 * std::numbers::pi * coupling_hz);
  }
  double rate_to_angular(double w) const { return w * 2.0 * std::numbers::pi * coupling_hz; }

  // A coupling ramp quoted as dJ/dt = 2 pi hbar v with v in Hz/ms, converted to
  // units of J^2/hbar.
  double ramp_velocity_from_hz_per_ms(double v_hz_per_ms) const {
    return v_hz_per_ms * 1e3 / (2.0 * std::numbers::pi * coupling_hz * coupling_hz);
  }

  void validate() const;
};

/// Mean-field interaction U = 4 pi hbar^2 a rho / m.
struct InteractionConversion {
  double scattering_length_bohr = 0.0;
  double mass_kg = si::kCs133Mass;
  double density_per_cm3 = 2e13;

  double scattering_length_m() const { return scattering_length_bohr * si::kBohrRadius; }
  double density_per_m3() const { return density_per_cm3 * 1e6; }
};

// U in joules. Throws ConfigError on nonpositive mass or density.
double scattering_length_to_U_joule(const InteractionConversion& conv);
// U in units of J for the given unit system.
double scattering_length_to_U(const InteractionConversion& conv, const UnitSystem& units);
// Inverse map: scattering length in Bohr radii that produces dimensionless U.
double U_to_scattering_length_bohr(double U, const InteractionConversion& conv,
                                   const UnitSystem& units);

}  // namespace nlaa
