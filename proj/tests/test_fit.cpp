#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "nlaa/errors.hpp"
#include "nlaa/fit.hpp"

using namespace nlaa;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

const TransitionModel kReference{0.6, 1.0 / 21.0, 1.2, 1.8};

}  // namespace

TEST(Model, StepBelongsToPowerBranch) {
  const TransitionModel m{0.6, 0.05, 1.2, 1.8};
  EXPECT_DOUBLE_EQ(m(1.8), 0.6 * std::pow(1.8, -1.2) + 0.05);
  EXPECT_DOUBLE_EQ(m(1.8000001), 0.05);
}

TEST(FitTransition, NoiselessRecoveryAtMidpoint) {
  // Grid spacing 0.1 from 0.25 puts 1.8 halfway between 1.75 and 1.85.
  auto ds = grid(0.25, 4.15, 40);
  const auto data = sample_transition_model(kReference, ds, 0.0, 1);
  const auto f = fit_transition(data);
  EXPECT_NEAR(f.delta_c, 1.8, 1e-6);
  EXPECT_NEAR(f.A, 0.6, 1e-6);
  EXPECT_NEAR(f.B, 1.0 / 21.0, 1e-6);
  EXPECT_NEAR(f.gamma, 1.2, 1e-6);
  EXPECT_LT(f.rss, 1e-20);
  EXPECT_EQ(f.n_points, 40);
  EXPECT_EQ(f.n_left, 16);
}

TEST(FitTransition, NoiselessOffGridBracketsTruth) {
  const auto ds = grid(0.2, 3.5, 40);
  const auto f = fit_transition(sample_transition_model(kReference, ds, 0.0, 1));
  EXPECT_NEAR(f.A, 0.6, 1e-6);
  EXPECT_NEAR(f.B, 1.0 / 21.0, 1e-6);
  EXPECT_NEAR(f.gamma, 1.2, 1e-6);
  const double h = ds[1] - ds[0];
  EXPECT_LT(std::abs(f.delta_c - 1.8), h);
}

TEST(FitTransition, NoisyRecovery) {
  const auto f = fit_transition(sample_transition_model(kReference, grid(0.2, 3.5, 40), 0.01, 2024));
  EXPECT_NEAR(f.delta_c, 1.8, 0.15);
  EXPECT_NEAR(f.gamma, 1.2, 0.3);
}

TEST(FitTransition, SelectedCandidateHasLowestRss) {
  const auto f = fit_transition(sample_transition_model(kReference, grid(0.2, 3.5, 40), 0.01, 5));
  ASSERT_FALSE(f.candidates.empty());
  for (const auto& c : f.candidates)
    if (c.admissible) EXPECT_GE(c.rss, f.rss - 1e-15);
}

TEST(FitTransition, Deterministic) {
  const auto d = sample_transition_model(kReference, grid(0.2, 3.5, 40), 0.01, 77);
  const auto a = fit_transition(d), b = fit_transition(d);
  EXPECT_EQ(a.delta_c, b.delta_c);
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.gamma, b.gamma);
}

TEST(FitTransition, WeightedData) {
  auto d = sample_transition_model(kReference, grid(0.2, 3.5, 40), 0.01, 3);
  for (auto& p : d) p.sigma = 0.01;
  EXPECT_NEAR(fit_transition(d).delta_c, 1.8, 0.15);
  d[4].sigma = 0.0;
  EXPECT_THROW(fit_transition(d), ConfigError);
}

TEST(FitTransition, Unidentifiable) {
  EXPECT_THROW(fit_transition(sample_transition_model(kReference, grid(0.2, 3.5, 5), 0.0, 1)), UnidentifiableError);
  // Rising data: every split leaves the left branch below the right-branch floor.
  std::vector<FitPoint> rising;
  for (double d : grid(0.5, 3.0, 12)) rising.push_back({d, 0.05 + 0.01 * d, 0.0});
  EXPECT_THROW(fit_transition(rising), UnidentifiableError);
}

TEST(FitTransition, RejectsNonpositiveDelta) {
  auto d = sample_transition_model(kReference, grid(0.2, 3.5, 10), 0.0, 1);
  d[0].delta = 0.0;
  EXPECT_THROW(fit_transition(d), ConfigError);
}

TEST(FitTransition, NoninteractingTheoryCurve) {
  CellRecipe rec;
  const auto pts = synthesize_measurement(rec, 0.0, grid(0.2, 4.0, 40), {}, 1);
  EXPECT_NEAR(fit_transition(pts).delta_c, 2.0, 0.1);
}

TEST(Synthesize, NoiselessMatchesPreparation) {
  CellRecipe rec;
  rec.preparation = Preparation::ramped;
  const std::vector<double> ds{0.5, 1.5, 3.0};
  const auto pts = synthesize_measurement(rec, 0.0, ds, {}, 9);
  for (std::size_t i = 0; i < ds.size(); ++i) EXPECT_EQ(pts[i].r, evaluate_cell(rec, ds[i], 0.0).r);
}

TEST(Synthesize, FloorRaisesLocalizedR) {
  CellRecipe rec;
  rec.preparation = Preparation::ramped;
  MeasurementNoise n;
  n.floor = 0.01;
  const auto clean = synthesize_measurement(rec, 0.0, {4.0}, {}, 1);
  const auto floored = synthesize_measurement(rec, 0.0, {4.0}, n, 1);
  EXPECT_GT(floored[0].r, clean[0].r);
  EXPECT_GT(floored[0].r, 1.0 / 21.0);
}

TEST(Synthesize, SeedReproducible) {
  CellRecipe rec;
  MeasurementNoise n;
  n.sigma = 0.01;
  const auto a = synthesize_measurement(rec, 0.3, {0.5, 1.0, 2.0}, n, 42);
  const auto b = synthesize_measurement(rec, 0.3, {0.5, 1.0, 2.0}, n, 42);
  const auto c = synthesize_measurement(rec, 0.3, {0.5, 1.0, 2.0}, n, 43);
  std::ostringstream sa, sb, sc;
  write_fit_points_csv(sa, a);
  write_fit_points_csv(sb, b);
  write_fit_points_csv(sc, c);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Bootstrap, NoiselessHasNoSpread) {
  const auto d = sample_transition_model(kReference, grid(0.2, 3.5, 40), 0.0, 1);
  EXPECT_LT(bootstrap_delta_c(d, 100, 1).stderr_delta_c, 1e-9);
}

TEST(Bootstrap, SmallJumpFamilySpread) {
  // With A = 0.6 the jump at Delta_c is ~30 sigma and every refit lands on the
  // same midpoint; a small jump gives a spread the bootstrap can resolve.
  const TransitionModel m{0.05, 1.0 / 21.0, 1.2, 1.8};
  const auto d = sample_transition_model(m, grid(0.2, 3.5, 40), 0.01, 0);
  const auto b = bootstrap_delta_c(d, 200, 7, 4);
  EXPECT_GT(b.stderr_delta_c, 1e-3);
  EXPECT_LT(b.stderr_delta_c, 0.3);
  EXPECT_EQ(b.resamples, 200);
}

TEST(Bootstrap, ShrinksWithMoreData) {
  const TransitionModel m{0.05, 1.0 / 21.0, 1.2, 1.8};
  double s40 = 0.0, s160 = 0.0;
  for (int seed = 0; seed < 5; ++seed) {
    s40 += bootstrap_delta_c(sample_transition_model(m, grid(0.2, 3.5, 40), 0.01, seed), 200, 7, 4).stderr_delta_c;
    s160 += bootstrap_delta_c(sample_transition_model(m, grid(0.2, 3.5, 160), 0.01, seed), 200, 7, 4).stderr_delta_c;
  }
  // sqrt(160/40) = 2
  EXPECT_GT(s40 / s160, 1.3);
  EXPECT_LT(s40 / s160, 3.5);
}

TEST(Bootstrap, IndependentOfWorkers) {
  const TransitionModel m{0.05, 1.0 / 21.0, 1.2, 1.8};
  const auto d = sample_transition_model(m, grid(0.2, 3.5, 40), 0.01, 3);
  const auto a = bootstrap_delta_c(d, 120, 11, 1), b = bootstrap_delta_c(d, 120, 11, 3);
  EXPECT_EQ(a.stderr_delta_c, b.stderr_delta_c);
  EXPECT_EQ(a.mean_delta_c, b.mean_delta_c);
  EXPECT_THROW(bootstrap_delta_c(d, 50, 11), ConfigError);
}

TEST(Line, ExactAndR2) {
  const auto l = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_NEAR(l.slope, 2.0, 1e-14);
  EXPECT_NEAR(l.intercept, 1.0, 1e-14);
  EXPECT_NEAR(l.r2, 1.0, 1e-14);
  EXPECT_THROW(fit_line({1, 1}, {0, 1}), ConfigError);
}

TEST(FitCsv, ReadWithAndWithoutHeader) {
  std::istringstream a("delta_over_j,r,sigma\n0.5,0.4,0.01\n1.0,0.3,0.01\n");
  const auto pa = read_fit_csv(a);
  ASSERT_EQ(pa.size(), 2u);
  EXPECT_EQ(pa[1].sigma, 0.01);
  std::istringstream b("0.5,0.4\n\n1.0,0.3\n");
  const auto pb = read_fit_csv(b);
  ASSERT_EQ(pb.size(), 2u);
  EXPECT_EQ(pb[0].sigma, 0.0);
  std::istringstream bad("0.5,0.4\nfoo,bar\n");
  EXPECT_THROW(read_fit_csv(bad), ConfigError);
}

TEST(FitCsv, RoundTrip) {
  const auto d = sample_transition_model(kReference, grid(0.2, 3.5, 12), 0.01, 4);
  std::ostringstream os;
  write_fit_points_csv(os, d);
  std::istringstream is(os.str());
  const auto back = read_fit_csv(is);
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(back[i].r, d[i].r, 5e-12 * std::abs(d[i].r));  // 12 significant digits
}
