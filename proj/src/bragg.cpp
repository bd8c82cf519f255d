#include "nlaa/bragg.hpp"

#include <algorithm>
#include <numbers>

#include "nlaa/errors.hpp"

namespace nlaa {

BraggSchedule bragg_detunings(const ModelParams& p, double recoil, int center) {
  p.validate();
  if (center < 0) center = (p.L - 1) / 2;
  if (center >= p.L) throw ConfigError("schedule center outside lattice");
  const auto eps = onsite_energies(p);
  BraggSchedule s;
  s.recoil = recoil;
  s.wavenumber = 1.0;
  const int links = p.L - 1;
  s.labels.reserve(static_cast<std::size_t>(links));
  for (int i = 0; i < links; ++i) {
    const int j = i - center;
    const double shift = eps[static_cast<std::size_t>(i + 1)] - eps[static_cast<std::size_t>(i)];
    s.labels.push_back(j);
    s.detunings.push_back(4.0 * (2.0 * j + 1.0) * recoil - shift);
    s.phases.push_back(p.J < 0.0 ? std::numbers::pi : 0.0);
  }
  if (s.detunings.size() != static_cast<std::size_t>(links))
    throw ConfigError("schedule length inconsistent with lattice size");
  return s;
}

double bragg_design_residual(const BraggSchedule& s, const ModelParams& p, int center) {
  if (center < 0) center = (p.L - 1) / 2;
  if (s.detunings.size() != static_cast<std::size_t>(p.L - 1))
    throw ConfigError("schedule length inconsistent with lattice size");
  const auto eps = onsite_energies(p);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.detunings.size(); ++i) {
    const int j = static_cast<int>(i) - center;
    const double r = s.detunings[i] - 4.0 * (2.0 * j + 1.0) * s.recoil + (eps[i + 1] - eps[i]);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace nlaa
