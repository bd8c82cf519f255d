#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nlaa/eigensolve.hpp"
#include "nlaa/model.hpp"

namespace nlaa {

/// Generalized AA chain with on-site term Delta cos(theta_j) / (1 - alpha cos(theta_j)),
/// theta_j = 2 pi beta j + phi.
struct GaaParams {
  int L = 987;
  double J = 1.0;
  double delta = 1.0;
  double beta = kGoldenConjugate;
  double phi = 0.0;
  double alpha = 0.0;

  void validate() const;  // |alpha| < 1, L >= 2
};

double gaa_potential(const GaaParams& gp, int j);
std::vector<double> gaa_onsite_energies(const GaaParams& gp);

/// E_c = sgn(Delta) (2|J| - |Delta|) / alpha. Throws ConfigError for alpha = 0,
/// where the transition is energy independent and there is no finite edge.
double gaa_mobility_edge(double J, double delta, double alpha);

// Predicted side of the edge: localized iff alpha E > sgn(Delta)(2|J| - |Delta|);
// for alpha = 0 every state is localized iff |Delta| > 2|J|.
bool gaa_predicted_localized(const GaaParams& gp, double energy);

struct GaaLevel {
  double energy = 0.0;
  double r = 0.0;
  bool localized = false;  // from r
  bool predicted_localized = false;
  bool agrees() const { return localized == predicted_localized; }
};

struct GaaClassification {
  std::vector<GaaLevel> levels;
  double r_threshold = 0.0;
  bool threshold_from_gap = false;
  std::optional<double> mobility_edge;
  double misclassified_fraction = 0.0;
};

/// Diagonalizes the chain and labels each eigenstate by r. The threshold sits at
/// the midpoint of the largest gap in sorted log r; if that gap is narrower
/// than min_log_gap the r distribution is not bimodal and 1/sqrt(L) is used.
GaaClassification gaa_classify_spectrum(const GaaParams& gp, double min_log_gap = 1.0);

struct EffectiveGaa {
  double delta_eff = 0.0;
  double alpha_eff = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  bool weak_coupling = true;  // |U/Delta| < 0.5
};

/// Matches the mean-field potential Delta cos(theta) - U n_j, with n_j expanded
/// to second harmonic along theta, onto the expansion Delta_eff cos + Delta_eff
/// alpha cos^2 of the GAA form. This gives Delta_eff = Delta - U c1 and
/// alpha_eff = -2 U c2 / Delta_eff. Harmonics are taken along the model's own
/// phase theta_j = 2 pi beta j + phi.
EffectiveGaa effective_gaa_from_density(const LatticeState& state, const ModelParams& p);

enum class EnergyDefinition { mu, functional };
std::string to_string(EnergyDefinition d);
EnergyDefinition energy_definition_from_string(const std::string& s);

struct AlphaStarOptions {
  int L = 21;
  double phi = 0.0;
  double beta = kGoldenConjugate;
  double delta_lo = 0.5;
  double delta_hi = 4.0;
  double delta_step = 0.05;
  double tol = 1e-3;
  EnergyDefinition energy_definition = EnergyDefinition::mu;
  SolverOptions solver{};
};

struct AlphaStarResult {
  double U = 0.0;
  double delta_c_gs = 0.0;
  double delta_c_es = 0.0;
  double e_c_gs = 0.0;  // per energy_definition
  double e_c_es = 0.0;
  double alpha_star = 0.0;
  EnergyDefinition energy_definition = EnergyDefinition::mu;
  // Both definitions, for reporting.
  double mu_gs = 0.0, mu_es = 0.0, energy_gs = 0.0, energy_es = 0.0;
  double alpha_star_mu = 0.0, alpha_star_energy = 0.0;
};

/// alpha* = (Delta_c^g - Delta_c^e) / (E_e - E_g), with the energies of the
/// GS and ES evaluated at their own critical points. Throws UnidentifiableError
/// if either transition is not bracketed by the Delta window.
AlphaStarResult extract_alpha_star(double U, const AlphaStarOptions& opts = {});

// One extraction per U, spread over `workers` threads; output order follows us.
std::vector<AlphaStarResult> extract_alpha_star_curve(const std::vector<double>& us, const AlphaStarOptions& opts,
                                                      int workers = 1);

// U/J, Delta_c^g, Delta_c^e, E^c_g, E^c_e, alpha*, energy_definition
void write_alpha_star_csv(std::ostream& os, const std::vector<AlphaStarResult>& rows);

}  // namespace nlaa
