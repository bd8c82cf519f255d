#include "nlaa/units.hpp"

#include <cmath>
#include <numbers>

#include "nlaa/errors.hpp"

namespace nlaa {

void UnitSystem::validate() const {
  if (!(coupling_hz > 0.0) || !std::isfinite(coupling_hz))
    throw ConfigError("coupling frequency must be positive and finite");
}

double scattering_length_to_U_joule(const InteractionConversion& conv) {
  if (!(conv.mass_kg > 0.0)) throw ConfigError("atomic mass must be positive");
  if (!(conv.density_per_cm3 > 0.0)) throw ConfigError("atomic density must be positive");
  return 4.0 * std::numbers::pi * si::kHbar * si::kHbar * conv.scattering_length_m() *
         conv.density_per_m3() / conv.mass_kg;
}

double scattering_length_to_U(const InteractionConversion& conv, const UnitSystem& units) {
  units.validate();
  return units.energy_from_joule(scattering_length_to_U_joule(conv));
}

double U_to_scattering_length_bohr(double U, const InteractionConversion& conv,
                                   const UnitSystem& units) {
  InteractionConversion unit = conv;
  unit.scattering_length_bohr = 1.0;
  return U / scattering_length_to_U(unit, units);
}

}  // namespace nlaa
