#include "nlaa/fit.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>

#include "nlaa/errors.hpp"
#include "nlaa/io.hpp"
#include "pool.hpp"

namespace nlaa {

namespace {

// Weighted residuals sqrt(w_i) (A x_i^-gamma + B - y_i) in the unknowns (A, gamma).
struct PowerLawResiduals {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const std::vector<double>& x;
  const std::vector<double>& y;
  const std::vector<double>& w;
  double B;

  int inputs() const { return 2; }
  int values() const { return static_cast<int>(x.size()); }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      f(static_cast<Eigen::Index>(i)) = std::sqrt(w[i]) * (p(0) * std::pow(x[i], -p(1)) + B - y[i]);
    return 0;
  }
  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& J) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double pw = std::pow(x[i], -p(1));
      J(k, 0) = std::sqrt(w[i]) * pw;
      J(k, 1) = -std::sqrt(w[i]) * p(0) * pw * std::log(x[i]);
    }
    return 0;
  }
};

struct BranchFit {
  double A = 0.0, gamma = 0.0, rss = 0.0;
  bool ok = false;
};

double branch_rss(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w,
                  double A, double gamma, double B) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = A * std::pow(x[i], -gamma) + B - y[i];
    s += w[i] * d * d;
  }
  return s;
}

BranchFit fit_power_branch(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w,
                           double B) {
  BranchFit bf;
  // Seed: weighted line through (log x, log(y - B)).
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] - B > 0.0)) return bf;
    const double lx = std::log(x[i]), ly = std::log(y[i] - B);
    sw += w[i];
    sx += w[i] * lx;
    sy += w[i] * ly;
    sxx += w[i] * lx * lx;
    sxy += w[i] * lx * ly;
  }
  const double den = sw * sxx - sx * sx;
  if (!(std::abs(den) > 1e-300)) return bf;
  const double slope = (sw * sxy - sx * sy) / den;
  const double icpt = (sy - slope * sx) / sw;
  double A = std::exp(icpt), gamma = -slope;
  double rss = branch_rss(x, y, w, A, gamma, B);

  if (x.size() > 2) {
    PowerLawResiduals fn{x, y, w, B};
    Eigen::LevenbergMarquardt<PowerLawResiduals> lm(fn);
    lm.parameters.xtol = 1e-15;
    lm.parameters.ftol = 1e-15;
    lm.parameters.maxfev = 2000;
    Eigen::VectorXd p(2);
    p << A, gamma;
    lm.minimize(p);
    if (p.allFinite()) {
      const double r2 = branch_rss(x, y, w, p(0), p(1), B);
      if (std::isfinite(r2) && r2 <= rss) {
        A = p(0);
        gamma = p(1);
        rss = r2;
      }
    }
  }
  if (!std::isfinite(A) || !std::isfinite(gamma) || !std::isfinite(rss)) return bf;
  bf = {A, gamma, rss, true};
  return bf;
}

}  // namespace

double TransitionModel::operator()(double delta) const {
  return (delta <= delta_c ? A * std::pow(delta, -gamma) : 0.0) + B;
}

FitResult fit_transition(std::vector<FitPoint> data) {
  if (data.size() < 6) throw UnidentifiableError("transition fit needs at least 6 points");
  for (const auto& p : data) {
    if (!(p.delta > 0.0) || !std::isfinite(p.delta) || !std::isfinite(p.r))
      throw ConfigError("fit data need finite Delta/J > 0 and finite r");
    if (p.sigma < 0.0 || !std::isfinite(p.sigma)) throw ConfigError("sigma must be finite and nonnegative");
  }
  const bool weighted = std::any_of(data.begin(), data.end(), [](const FitPoint& p) { return p.sigma > 0.0; });
  if (weighted && std::any_of(data.begin(), data.end(), [](const FitPoint& p) { return p.sigma == 0.0; }))
    throw ConfigError("either every point carries sigma or none does");
  std::stable_sort(data.begin(), data.end(), [](const FitPoint& a, const FitPoint& b) { return a.delta < b.delta; });

  const std::size_t n = data.size();
  std::vector<double> x(n), y(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = data[i].delta;
    y[i] = data[i].r;
    w[i] = weighted ? 1.0 / (data[i].sigma * data[i].sigma) : 1.0;
  }

  FitResult best;
  best.n_points = static_cast<int>(n);
  bool have = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (x[k + 1] == x[k]) continue;
    FitCandidate cand;
    cand.delta_c = 0.5 * (x[k] + x[k + 1]);
    const std::size_t nl = k + 1;  // points with x <= delta_c
    if (nl >= 2) {
      double sw = 0.0, swy = 0.0;
      for (std::size_t i = nl; i < n; ++i) {
        sw += w[i];
        swy += w[i] * y[i];
      }
      const double B = swy / sw;
      if (B >= 0.0) {
        const std::vector<double> xl(x.begin(), x.begin() + nl), yl(y.begin(), y.begin() + nl),
            wl(w.begin(), w.begin() + nl);
        const BranchFit bf = fit_power_branch(xl, yl, wl, B);
        if (bf.ok) {
          double rss = bf.rss;
          for (std::size_t i = nl; i < n; ++i) rss += w[i] * (y[i] - B) * (y[i] - B);
          cand.rss = rss;
          cand.admissible = true;
          if (!have || rss < best.rss) {
            have = true;
            best.A = bf.A;
            best.gamma = bf.gamma;
            best.B = B;
            best.delta_c = cand.delta_c;
            best.rss = rss;
            best.n_left = static_cast<int>(nl);
          }
        }
      }
    }
    best.candidates.push_back(cand);
  }
  if (!have) throw UnidentifiableError("no split of the data admits the power-law-plus-floor model");
  return best;
}

std::vector<FitPoint> sample_transition_model(const TransitionModel& m, const std::vector<double>& deltas,
                                              double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<FitPoint> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    const double r = m(d) + (sigma > 0.0 ? sigma * noise(rng) : 0.0);
    out.push_back({d, r, 0.0});
  }
  return out;
}

std::vector<FitPoint> synthesize_measurement(const CellRecipe& recipe, double U, const std::vector<double>& deltas,
                                             const MeasurementNoise& noise, std::uint64_t seed) {
  if (noise.sigma < 0.0 || noise.floor < 0.0) throw ConfigError("noise sigma and floor must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<FitPoint> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    const auto prep = prepare_state(recipe, d, U);
    if (!prep.converged) throw NumericalError("state preparation failed at Delta/J=" + fmt(d));
    auto n = prep.state.density();
    if (noise.floor > 0.0) {
      double total = 0.0;
      for (double& v : n) total += (v += noise.floor);
      for (double& v : n) v /= total;
    }
    double r = participation_ratio(n);
    if (noise.sigma > 0.0) r += noise.sigma * gauss(rng);
    out.push_back({d, r, 0.0});
  }
  return out;
}

BootstrapResult bootstrap_delta_c(const std::vector<FitPoint>& data, int n_resamples, std::uint64_t seed,
                                  int workers) {
  if (n_resamples < 100) throw ConfigError("bootstrap needs at least 100 resamples");
  const FitResult base = fit_transition(data);
  const TransitionModel m = base.model();
  std::vector<double> fitted(data.size()), resid(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    fitted[i] = m(data[i].delta);
    resid[i] = data[i].r - fitted[i];
  }
  std::vector<double> dc(static_cast<std::size_t>(n_resamples), std::numeric_limits<double>::quiet_NaN());
  detail::parallel_for(dc.size(), workers, [&](std::size_t b) {
    std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(b)};
    std::mt19937_64 rng(ss);
    std::uniform_int_distribution<std::size_t> pick(0, data.size() - 1);
    std::vector<FitPoint> boot = data;
    for (std::size_t i = 0; i < boot.size(); ++i) boot[i].r = fitted[i] + resid[pick(rng)];
    try {
      dc[b] = fit_transition(std::move(boot)).delta_c;
    } catch (const UnidentifiableError&) {
    }
  });
  BootstrapResult br;
  br.resamples = n_resamples;
  std::vector<double> good;
  for (double v : dc)
    if (std::isfinite(v)) good.push_back(v);
  br.failures = n_resamples - static_cast<int>(good.size());
  if (br.failures * 5 > n_resamples)
    throw UnidentifiableError(std::to_string(br.failures) + " of " + std::to_string(n_resamples) +
                              " bootstrap refits failed");
  br.mean_delta_c = std::accumulate(good.begin(), good.end(), 0.0) / static_cast<double>(good.size());
  double ss = 0.0;
  for (double v : good) ss += (v - br.mean_delta_c) * (v - br.mean_delta_c);
  br.stderr_delta_c = good.size() > 1 ? std::sqrt(ss / static_cast<double>(good.size() - 1)) : 0.0;
  return br;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("line fit needs two or more paired samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("line fit needs distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

std::vector<FitPoint> read_fit_csv(std::istream& in) {
  std::vector<FitPoint> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    FitPoint p;
    if (!(ls >> p.delta >> p.r)) {
      if (pts.empty() && lineno == 1) continue;  // header
      throw ConfigError("fit input line " + std::to_string(lineno) + ": expected delta_over_j,r[,sigma]");
    }
    if (!(ls >> p.sigma)) p.sigma = 0.0;
    pts.push_back(p);
  }
  return pts;
}

void write_fit_points_csv(std::ostream& os, const std::vector<FitPoint>& pts) {
  CsvWriter w(os);
  w.header({"delta_over_j", "r", "sigma"});
  for (const auto& p : pts) {
    w.cell(p.delta).cell(p.r).cell(p.sigma);
    w.end_row();
  }
}

void write_fitted_curve_csv(std::ostream& os, const FitResult& fr, const std::vector<FitPoint>& data, int samples) {
  CsvWriter w(os);
  w.header({"delta_over_j", "r_fit"});
  if (data.empty() || samples < 2) return;
  auto [lo, hi] = std::minmax_element(data.begin(), data.end(),
                                      [](const FitPoint& a, const FitPoint& b) { return a.delta < b.delta; });
  const auto m = fr.model();
  for (int i = 0; i < samples; ++i) {
    const double d = lo->delta + (hi->delta - lo->delta) * i / (samples - 1);
    w.cell(d).cell(m(d));
    w.end_row();
  }
}

}  // namespace nlaa
