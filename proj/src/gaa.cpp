#include "nlaa/gaa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlaa/errors.hpp"
#include "nlaa/io.hpp"
#include "nlaa/scan.hpp"
#include "pool.hpp"

namespace nlaa {

void GaaParams::validate() const {
  if (L < 2) throw ConfigError("GAA chain needs L >= 2");
  if (!(std::abs(alpha) < 1.0)) throw ConfigError("GAA deformation must satisfy |alpha| < 1");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
  if (!std::isfinite(J) || !std::isfinite(delta) || !std::isfinite(phi)) throw ConfigError("non-finite GAA parameter");
}

double gaa_potential(const GaaParams& gp, int j) {
  gp.validate();
  if (j < 0 || j >= gp.L) throw ConfigError("site index outside lattice");
  const double c = std::cos(2.0 * std::numbers::pi * gp.beta * j + gp.phi);
  return gp.delta * c / (1.0 - gp.alpha * c);
}

std::vector<double> gaa_onsite_energies(const GaaParams& gp) {
  std::vector<double> v(static_cast<std::size_t>(gp.L));
  for (int j = 0; j < gp.L; ++j) v[static_cast<std::size_t>(j)] = gaa_potential(gp, j);
  return v;
}

double gaa_mobility_edge(double J, double delta, double alpha) {
  if (alpha == 0.0) throw ConfigError("alpha = 0 is the AA limit: the transition is energy independent");
  const double sgn = delta > 0.0 ? 1.0 : (delta < 0.0 ? -1.0 : 0.0);
  return sgn * (2.0 * std::abs(J) - std::abs(delta)) / alpha;
}

bool gaa_predicted_localized(const GaaParams& gp, double energy) {
  if (gp.alpha == 0.0) return std::abs(gp.delta) > 2.0 * std::abs(gp.J);
  const double sgn = gp.delta > 0.0 ? 1.0 : (gp.delta < 0.0 ? -1.0 : 0.0);
  return gp.alpha * energy > sgn * (2.0 * std::abs(gp.J) - std::abs(gp.delta));
}

GaaClassification gaa_classify_spectrum(const GaaParams& gp, double min_log_gap) {
  gp.validate();
  const auto spec = linear_spectrum(gp.J, gaa_onsite_energies(gp));
  GaaClassification out;
  if (gp.alpha != 0.0) out.mobility_edge = gaa_mobility_edge(gp.J, gp.delta, gp.alpha);
  const std::size_t n = spec.values.size();
  std::vector<double> logr(n);
  out.levels.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> dens(n);
    for (std::size_t j = 0; j < n; ++j) dens[j] = spec.vectors[k][j] * spec.vectors[k][j];
    out.levels[k].energy = spec.values[k];
    out.levels[k].r = participation_ratio(dens);
    logr[k] = std::log(out.levels[k].r);
  }
  std::sort(logr.begin(), logr.end());
  double gap = 0.0, mid = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (logr[k + 1] - logr[k] > gap) {
      gap = logr[k + 1] - logr[k];
      mid = 0.5 * (logr[k + 1] + logr[k]);
    }
  }
  out.threshold_from_gap = gap >= min_log_gap;
  out.r_threshold = out.threshold_from_gap ? std::exp(mid) : 1.0 / std::sqrt(static_cast<double>(gp.L));
  std::size_t wrong = 0;
  for (auto& lv : out.levels) {
    lv.localized = lv.r < out.r_threshold;
    lv.predicted_localized = gaa_predicted_localized(gp, lv.energy);
    if (!lv.agrees()) ++wrong;
  }
  out.misclassified_fraction = static_cast<double>(wrong) / static_cast<double>(n);
  return out;
}

EffectiveGaa effective_gaa_from_density(const LatticeState& state, const ModelParams& p) {
  p.validate();
  if (state.size() != p.L) throw ConfigError("state length does not match L");
  const auto h = density_fourier_coefficients(state, p.beta, 2, p.phi);
  EffectiveGaa e;
  e.c1 = h.c[0];
  e.c2 = h.c[1];
  e.delta_eff = p.delta - p.U * e.c1;
  if (std::abs(e.delta_eff) < 1e-12) throw NumericalError("effective disorder vanishes; GAA matching undefined");
  e.alpha_eff = -2.0 * p.U * e.c2 / e.delta_eff;
  e.weak_coupling = std::abs(p.U) < 0.5 * std::abs(p.delta);
  return e;
}

std::string to_string(EnergyDefinition d) { return d == EnergyDefinition::mu ? "mu" : "E"; }

EnergyDefinition energy_definition_from_string(const std::string& s) {
  if (s == "mu") return EnergyDefinition::mu;
  if (s == "E" || s == "energy") return EnergyDefinition::functional;
  throw ConfigError("energy definition must be mu or E");
}

AlphaStarResult extract_alpha_star(double U, const AlphaStarOptions& opts) {
  CellRecipe rec;
  rec.L = opts.L;
  rec.phi = opts.phi;
  rec.beta = opts.beta;
  rec.solver = opts.solver;
  const double rc = critical_r(opts.L, opts.phi, opts.beta);
  const auto deltas = linspace_step(opts.delta_lo, opts.delta_hi, opts.delta_step);

  AlphaStarResult a;
  a.U = U;
  a.energy_definition = opts.energy_definition;
  double dc[2];
  double mu[2], en[2];
  for (int k = 0; k < 2; ++k) {
    rec.kind = k == 0 ? StateKind::ground : StateKind::highest_excited;
    const auto t = find_transition(rec, U, deltas, rc, opts.tol);
    if (!t.found())
      throw UnidentifiableError(to_string(rec.kind) + " transition at U/J=" + fmt(U) + " not bracketed in [" +
                                fmt(opts.delta_lo) + ", " + fmt(opts.delta_hi) + "] (" + t.describe() + ")");
    dc[k] = t.delta_c;
    const auto s = solve_state(rec.params(t.delta_c, U), rec.kind, opts.solver);
    if (!s.converged) throw NumericalError("state at the critical point did not converge");
    mu[k] = s.mu;
    en[k] = s.energy;
  }
  a.delta_c_gs = dc[0];
  a.delta_c_es = dc[1];
  a.mu_gs = mu[0];
  a.mu_es = mu[1];
  a.energy_gs = en[0];
  a.energy_es = en[1];
  a.alpha_star_mu = (dc[0] - dc[1]) / (mu[1] - mu[0]);
  a.alpha_star_energy = (dc[0] - dc[1]) / (en[1] - en[0]);
  const bool use_mu = opts.energy_definition == EnergyDefinition::mu;
  a.e_c_gs = use_mu ? mu[0] : en[0];
  a.e_c_es = use_mu ? mu[1] : en[1];
  a.alpha_star = use_mu ? a.alpha_star_mu : a.alpha_star_energy;
  return a;
}

std::vector<AlphaStarResult> extract_alpha_star_curve(const std::vector<double>& us, const AlphaStarOptions& opts,
                                                      int workers) {
  std::vector<AlphaStarResult> rows(us.size());
  detail::parallel_for(us.size(), workers, [&](std::size_t i) { rows[i] = extract_alpha_star(us[i], opts); });
  return rows;
}

void write_alpha_star_csv(std::ostream& os, const std::vector<AlphaStarResult>& rows) {
  CsvWriter w(os);
  w.header({"u_over_j", "delta_c_gs", "delta_c_es", "e_c_gs", "e_c_es", "alpha_star", "energy_definition",
            "alpha_star_mu", "alpha_star_E"});
  for (const auto& a : rows) {
    w.cell(a.U).cell(a.delta_c_gs).cell(a.delta_c_es).cell(a.e_c_gs).cell(a.e_c_es).cell(a.alpha_star);
    w.cell(to_string(a.energy_definition)).cell(a.alpha_star_mu).cell(a.alpha_star_energy);
    w.end_row();
  }
}

}  // namespace nlaa
