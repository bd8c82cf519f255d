#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlaa/bragg.hpp"
#include "nlaa/errors.hpp"
#include "nlaa/eigensolve.hpp"
#include "nlaa/model.hpp"
#include "nlaa/units.hpp"

using namespace nlaa;

namespace {

ModelParams params(int L, double delta, double U, double phi = 0.0, double J = 1.0) {
  ModelParams p;
  p.L = L;
  p.delta = delta;
  p.U = U;
  p.phi = phi;
  p.J = J;
  return p;
}

LatticeState random_state(int L, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexVector a(static_cast<std::size_t>(L));
  for (auto& z : a) z = {g(rng), g(rng)};
  return LatticeState(a);
}

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

TEST(Potential, ZeroAmplitudeVanishes) {
  const auto p = params(21, 0.0, 0.0, 0.7);
  for (int j = 0; j < 21; ++j) EXPECT_EQ(quasiperiodic_potential(p, j), 0.0);
}

TEST(Potential, OriginAtZeroPhase) { EXPECT_DOUBLE_EQ(quasiperiodic_potential(params(21, 1.0, 0.0), 0), 1.0); }

TEST(Potential, FirstSiteGoldenRatio) {
  // 2 cos(2 pi * 0.6180339887), evaluated separately.
  EXPECT_NEAR(quasiperiodic_potential(params(21, 2.0, 0.0), 1), -1.4748, 1e-4);
}

TEST(Potential, RejectsOutOfRangeSite) {
  EXPECT_THROW(quasiperiodic_potential(params(21, 1.0, 0.0), 21), ConfigError);
  EXPECT_THROW(quasiperiodic_potential(params(21, 1.0, 0.0), -1), ConfigError);
}

TEST(Params, ValidateRejectsBadInput) {
  EXPECT_THROW(params(1, 1.0, 0.0).validate(), ConfigError);
  auto p = params(21, 1.0, 0.0);
  p.beta = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
  p = params(21, std::nan(""), 0.0);
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(MirrorPhase, MakesPotentialOdd) {
  for (int L : {21, 144}) {
    auto p = params(L, 1.0, 0.0, mirror_odd_phase(L));
    const auto e = onsite_energies(p);
    for (int j = 0; j < L; ++j)
      EXPECT_NEAR(e[static_cast<std::size_t>(j)], -e[static_cast<std::size_t>(L - 1 - j)], 1e-12);
  }
}

TEST(LatticeStateTest, ConstructorsNormalize) {
  std::mt19937_64 rng(1);
  EXPECT_NEAR(random_state(33, rng).norm_squared(), 1.0, 1e-12);
  EXPECT_NEAR(LatticeState::uniform(21).norm_squared(), 1.0, 1e-12);
  const std::vector<double> re{3.0, 4.0};
  EXPECT_NEAR(LatticeState::from_real(re).norm_squared(), 1.0, 1e-12);
  EXPECT_THROW(LatticeState(ComplexVector(5, Complex{0.0, 0.0})), ConfigError);
  EXPECT_THROW(LatticeState(ComplexVector{}), ConfigError);
}

TEST(Hamiltonian, HoppingOnlyFromSingleSite) {
  const auto p = params(21, 0.0, 0.0);
  const auto out = apply_hamiltonian(p, LatticeState::site(21, 7));
  for (int j = 0; j < 21; ++j) {
    const double want = (j == 6 || j == 8) ? 1.0 : 0.0;
    EXPECT_NEAR(std::abs(out[static_cast<std::size_t>(j)] - Complex{want, 0.0}), 0.0, 1e-15) << j;
  }
}

TEST(Hamiltonian, DiagonalWithoutHopping) {
  std::mt19937_64 rng(2);
  const auto p = params(21, 1.7, 0.0, 0.3, 0.0);
  const auto s = random_state(21, rng);
  const auto out = apply_hamiltonian(p, s);
  const auto eps = onsite_energies(p);
  for (int j = 0; j < 21; ++j) EXPECT_NEAR(std::abs(out[static_cast<std::size_t>(j)] - eps[static_cast<std::size_t>(j)] * s[j]), 0.0, 1e-15);
}

TEST(Hamiltonian, AttractiveSign) {
  const auto p = params(21, 0.0, 1.0, 0.0, 0.0);
  const auto out = apply_hamiltonian(p, LatticeState::site(21, 4));
  EXPECT_NEAR(out[4].real(), -1.0, 1e-15);
}

TEST(Hamiltonian, LinearPartIsHermitian) {
  std::mt19937_64 rng(3);
  const auto p = params(21, 1.3, 0.0, 0.9);
  for (int k = 0; k < 20; ++k) {
    const auto a = random_state(21, rng), b = random_state(21, rng);
    const auto ha = apply_hamiltonian(p, a), hb = apply_hamiltonian(p, b);
    EXPECT_LT(std::abs(dot(a.amplitudes(), hb) - dot(ha, b.amplitudes())), 1e-12);
  }
}

TEST(Participation, Examples) {
  EXPECT_NEAR(participation_ratio(LatticeState::uniform(21)), 1.0, 1e-12);
  EXPECT_NEAR(participation_ratio(LatticeState::site(21, 3)), 1.0 / 21.0, 1e-12);
  std::vector<double> two(21, 0.0);
  two[2] = two[9] = 0.5;
  EXPECT_NEAR(participation_ratio(two), 2.0 / 21.0, 1e-12);
}

TEST(Participation, Bounds) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const double r = participation_ratio(random_state(21, rng));
    EXPECT_GE(r, 1.0 / 21.0 - 1e-15);
    EXPECT_LE(r, 1.0 + 1e-15);
    EXPECT_LT(r, 1.0 - 1e-6);
  }
}

TEST(Width, Examples) {
  EXPECT_EQ(momentum_width(LatticeState::site(21, 10)), 0.0);
  std::vector<double> n(21, 0.0);
  n[9] = n[11] = 0.5;
  EXPECT_NEAR(momentum_width(n, 10), 1.0, 1e-15);
  // Center field follows the constructor argument.
  EXPECT_NEAR(momentum_width(LatticeState::site(21, 4, 0)), 4.0, 1e-15);
}

TEST(Energy, Examples) {
  std::mt19937_64 rng(5);
  EXPECT_EQ(energy_functional(params(21, 0.0, 0.0, 0.0, 0.0), random_state(21, rng)), 0.0);
  const auto p = params(21, 1.4, 0.0, 0.2, 0.0);
  EXPECT_NEAR(energy_functional(p, LatticeState::site(21, 6)), quasiperiodic_potential(p, 6), 1e-15);
  EXPECT_NEAR(energy_functional(params(21, 0.0, 1.0, 0.0, 0.0), LatticeState::site(21, 6)), -0.5, 1e-15);
}

TEST(ChemicalPotential, Examples) {
  EXPECT_NEAR(chemical_potential(params(21, 0.0, 1.0, 0.0, 0.0), LatticeState::site(21, 6)), -1.0, 1e-15);
  const auto p = params(21, 1.0, 0.0);
  const auto spec = linear_spectrum(p.J, onsite_energies(p));
  const auto gs = LatticeState::from_real(spec.vectors[0]);
  EXPECT_NEAR(chemical_potential(p, gs), spec.values[0], 1e-12);
}

TEST(ChemicalPotential, IdentityWithEnergy) {
  std::mt19937_64 rng(6);
  for (double U : {-1.3, 0.0, 0.4, 2.0}) {
    const auto p = params(21, 1.1, U, 0.5);
    const auto s = random_state(21, rng);
    double sum_n2 = 0.0;
    for (double n : s.density()) sum_n2 += n * n;
    EXPECT_NEAR(chemical_potential(p, s) - energy_functional(p, s) + 0.5 * U * sum_n2, 0.0, 1e-13);
  }
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(7);
  const auto p = params(13, 1.2, 0.9, 0.3);
  const auto eps = onsite_energies(p);
  const auto s = random_state(13, rng);
  const ComplexVector a(s.amplitudes().begin(), s.amplitudes().end());
  const auto g = energy_gradient(p, s);
  const double h = 1e-6;
  for (std::size_t j = 0; j < a.size(); ++j) {
    auto up = a, dn = a;
    up[j] += h;
    dn[j] -= h;
    const double dre = (energy_functional(p.J, eps, p.U, up) - energy_functional(p.J, eps, p.U, dn)) / (2 * h);
    up = a;
    dn = a;
    up[j] += Complex{0.0, h};
    dn[j] -= Complex{0.0, h};
    const double dim = (energy_functional(p.J, eps, p.U, up) - energy_functional(p.J, eps, p.U, dn)) / (2 * h);
    EXPECT_NEAR(g[j].real(), dre, 1e-7);
    EXPECT_NEAR(g[j].imag(), dim, 1e-7);
  }
}

TEST(Gradient, ProjectedIsTangent) {
  std::mt19937_64 rng(8);
  const auto p = params(21, 0.8, -0.6, 1.1);
  const auto s = random_state(21, rng);
  const auto g = energy_gradient(p, s, true);
  EXPECT_NEAR(dot(s.amplitudes(), g).real(), 0.0, 1e-13);
}

TEST(Fourier, UniformHasNoHarmonics) {
  const auto h = density_fourier_coefficients(LatticeState::uniform(144), kGoldenConjugate, 3);
  EXPECT_NEAR(h.mean, 1.0 / 144.0, 1e-15);
  for (double c : h.c) EXPECT_LT(std::abs(c), 2.0 / 144.0);
}

TEST(Fourier, CosineDensityOracle) {
  const int L = 610;
  std::vector<double> n(L);
  double z = 0.0;
  for (int j = 0; j < L; ++j) z += n[static_cast<std::size_t>(j)] = 1.0 + std::cos(2 * std::numbers::pi * kGoldenConjugate * j);
  std::vector<double> amp(L);
  for (int j = 0; j < L; ++j) amp[static_cast<std::size_t>(j)] = std::sqrt(n[static_cast<std::size_t>(j)]);
  const auto h = density_fourier_coefficients(LatticeState::from_real(amp), kGoldenConjugate, 2);
  // n_j = (1 + cos)/z, so c_1 = (2/L)(L/2)/z = 1/z up to O(1/L) leakage.
  EXPECT_NEAR(h.c[0] * z, 1.0, 0.01);
  EXPECT_LT(std::abs(h.c[1] * z), 0.01);
}

TEST(Fourier, LinearGroundStateAnticorrelates) {
  const auto p = params(21, 1.0, 0.0);
  const auto gs = LatticeState::from_real(linear_ground_vector(p.J, onsite_energies(p)));
  EXPECT_LT(density_fourier_coefficients(gs, p.beta, 2).c[0], 0.0);
}

TEST(Units, TimeAndEnergyRoundTrip) {
  const UnitSystem u{275.0};
  EXPECT_NEAR(u.time_from_ms(1.0), 2 * std::numbers::pi * 0.275, 1e-12);
  EXPECT_NEAR(u.time_to_ms(u.time_from_ms(3.7)), 3.7, 1e-12);
  EXPECT_NEAR(u.energy_from_hz(550.0), 2.0, 1e-15);
  EXPECT_NEAR(u.energy_from_joule(u.energy_to_joule(1.234)), 1.234, 1e-12);
  // 275 Hz/ms into a 275 Hz coupling: J grows by one unit in 1 ms.
  EXPECT_NEAR(u.ramp_velocity_from_hz_per_ms(275.0) * u.time_from_ms(1.0), 1.0, 1e-12);
}

TEST(Units, ScatteringLength) {
  const UnitSystem u{275.0};
  InteractionConversion c;
  EXPECT_EQ(scattering_length_to_U(c, u), 0.0);
  c.scattering_length_bohr = 100.0;
  const double U = scattering_length_to_U(c, u);
  // 4 pi hbar^2 a rho / m for Cs at 2e13 cm^-3, by hand: about 101 Hz.
  EXPECT_NEAR(U * 275.0, 101.1, 0.5);
  EXPECT_NEAR(U, 0.37, 0.01);
  c.scattering_length_bohr = -100.0;
  EXPECT_DOUBLE_EQ(scattering_length_to_U(c, u), -U);
  EXPECT_NEAR(U_to_scattering_length_bohr(U, c, u), 100.0, 1e-9);
  c.mass_kg = 0.0;
  EXPECT_THROW(scattering_length_to_U(c, u), ConfigError);
}

TEST(Bragg, RecoilLadder) {
  const UnitSystem u{275.0};
  const double er = u.energy_from_hz(5.3e3);
  const auto s = bragg_detunings(params(21, 0.0, 0.0), er);
  ASSERT_EQ(s.labels.size(), 20u);
  EXPECT_EQ(s.labels.front(), -10);
  EXPECT_EQ(s.labels.back(), 9);
  // Link j couples labels j, j+1; detuning over 2 pi in Hz is d * coupling_hz.
  EXPECT_NEAR(s.detunings[10] * u.coupling_hz, 21.2e3, 1e-6);
  EXPECT_NEAR(s.detunings[11] * u.coupling_hz, 63.6e3, 1e-6);
}

TEST(Bragg, DisorderShiftsByOnsiteDifference) {
  const double er = 19.27;
  const auto p0 = params(21, 0.0, 0.0, 0.4);
  const auto p = params(21, 1.6, 0.0, 0.4);
  const auto s0 = bragg_detunings(p0, er), s = bragg_detunings(p, er);
  const auto eps = onsite_energies(p);
  for (std::size_t k = 0; k < s.detunings.size(); ++k)
    EXPECT_NEAR(s.detunings[k] - s0.detunings[k], -(eps[k + 1] - eps[k]), 1e-12);
  EXPECT_LT(bragg_design_residual(s, p), 1e-12);
}
