#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "nlaa/scan.hpp"

namespace nlaa {

struct FitPoint {
  double delta = 0.0;
  double r = 0.0;
  double sigma = 0.0;  // 0: unweighted
};

/// r(Delta) = A Delta^-gamma Theta(Delta_c - Delta) + B with Theta(0) = 1, so a
/// point sitting exactly on Delta_c belongs to the power-law branch.
struct TransitionModel {
  double A = 0.6;
  double B = 1.0 / 21.0;
  double gamma = 1.2;
  double delta_c = 1.8;

  double operator()(double delta) const;
};

struct FitCandidate {
  double delta_c = 0.0;
  double rss = 0.0;
  bool admissible = false;
};

struct FitResult {
  double A = 0.0;
  double B = 0.0;
  double gamma = 0.0;
  double delta_c = 0.0;
  double rss = 0.0;
  double delta_c_stderr = std::numeric_limits<double>::quiet_NaN();
  int n_points = 0;
  int n_left = 0;  // points on the power-law branch
  std::vector<FitCandidate> candidates;

  TransitionModel model() const { return {A, B, gamma, delta_c}; }
};

/// Outer search over Delta_c at midpoints between consecutive distinct Delta
/// samples; for each split, B is the (weighted) mean of the right branch and
/// (A, gamma) come from a log-linear fit of r - B refined by Levenberg-Marquardt.
/// Splits whose left branch has r <= B anywhere, fewer than two points, or an
/// empty right branch are skipped. Throws UnidentifiableError if none is left.
FitResult fit_transition(std::vector<FitPoint> data);

/// Noisy samples of the model on the given Delta grid.
std::vector<FitPoint> sample_transition_model(const TransitionModel& m, const std::vector<double>& deltas,
                                              double sigma, std::uint64_t seed);

struct MeasurementNoise {
  double sigma = 0.0;  // additive Gaussian noise on r
  double floor = 0.0;  // population added to every site before renormalizing
};

/// Emulated measurement: states from `recipe` (ramped or exact) at each Delta,
/// a uniform residual population `floor` on every site, then Gaussian noise on r.
std::vector<FitPoint> synthesize_measurement(const CellRecipe& recipe, double U, const std::vector<double>& deltas,
                                             const MeasurementNoise& noise, std::uint64_t seed);

struct BootstrapResult {
  double stderr_delta_c = 0.0;
  double mean_delta_c = 0.0;
  int resamples = 0;
  int failures = 0;
};

/// Residual bootstrap: refit fitted + resampled residuals n_resamples times.
/// Resample b draws from its own stream seeded by (seed, b), so the result does
/// not depend on the number of workers. Throws UnidentifiableError when more
/// than 20% of the refits fail.
BootstrapResult bootstrap_delta_c(const std::vector<FitPoint>& data, int n_resamples, std::uint64_t seed,
                                  int workers = 1);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// delta_over_j, r[, sigma]; header row optional.
std::vector<FitPoint> read_fit_csv(std::istream& in);
void write_fit_points_csv(std::ostream& os, const std::vector<FitPoint>& pts);
void write_fitted_curve_csv(std::ostream& os, const FitResult& fr, const std::vector<FitPoint>& data,
                            int samples = 200);

}  // namespace nlaa
