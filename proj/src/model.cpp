#include "nlaa/model.hpp"

#include <numbers>
#include <numeric>
#include <string>

#include "nlaa/errors.hpp"

namespace nlaa {

namespace {

int default_center(int L, int center) {
  if (center < 0) return (L - 1) / 2;
  if (center >= L) throw ConfigError("center site " + std::to_string(center) + " outside lattice");
  return center;
}

}  // namespace

void ModelParams::validate() const {
  if (L < 2) throw ConfigError("lattice size L must be at least 2");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
  for (double v : {J, delta, phi, U})
    if (!std::isfinite(v)) throw ConfigError("model parameters must be finite");
}

bool ModelParams::self_trapping_risk() const {
  if (J == 0.0) return U != 0.0;
  return std::abs(U / J) > 1.5;
}

ModelParams ModelParams::negated() const {
  ModelParams n = *this;
  n.J = -J;
  n.delta = -delta;
  n.U = -U;
  return n;
}

double mirror_odd_phase(int L, double beta) {
  const double two_pi = 2.0 * std::numbers::pi;
  double phase = std::numbers::pi / 2.0 - std::numbers::pi * beta * (L - 1);
  phase = std::fmod(phase, two_pi);
  if (phase < 0.0) phase += two_pi;
  return phase;
}

LatticeState::LatticeState(ComplexVector amplitudes, int center) : amps_(std::move(amplitudes)) {
  if (amps_.empty()) throw ConfigError("lattice state must have at least one site");
  double n2 = 0.0;
  for (const auto& a : amps_) n2 += std::norm(a);
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw ConfigError("lattice state has zero or invalid norm");
  const double s = 1.0 / std::sqrt(n2);
  for (auto& a : amps_) a *= s;
  center_ = default_center(size(), center);
}

LatticeState LatticeState::from_real(std::span<const double> amplitudes, int center) {
  return LatticeState(ComplexVector(amplitudes.begin(), amplitudes.end()), center);
}

LatticeState LatticeState::site(int L, int j, int center) {
  if (j < 0 || j >= L) throw ConfigError("site index out of range");
  ComplexVector a(static_cast<std::size_t>(L));
  a[static_cast<std::size_t>(j)] = 1.0;
  return LatticeState(std::move(a), center);
}

LatticeState LatticeState::uniform(int L, int center) {
  return LatticeState(ComplexVector(static_cast<std::size_t>(L), Complex(1.0, 0.0)), center);
}

std::vector<double> LatticeState::density() const {
  std::vector<double> n(amps_.size());
  for (std::size_t j = 0; j < amps_.size(); ++j) n[j] = std::norm(amps_[j]);
  return n;
}

double LatticeState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

double quasiperiodic_potential(const ModelParams& p, int j) {
  if (j < 0 || j >= p.L) throw ConfigError("site index out of range");
  return p.delta * std::cos(2.0 * std::numbers::pi * p.beta * j + p.phi);
}

std::vector<double> onsite_energies(const ModelParams& p) {
  std::vector<double> eps(static_cast<std::size_t>(p.L));
  for (int j = 0; j < p.L; ++j) eps[static_cast<std::size_t>(j)] = quasiperiodic_potential(p, j);
  return eps;
}

void apply_hamiltonian(double J, std::span<const double> eps, double U,
                       std::span<const Complex> in, std::span<Complex> out) {
  const std::size_t L = eps.size();
  if (in.size() != L || out.size() != L) throw ConfigError("state length does not match lattice size");
  for (std::size_t j = 0; j < L; ++j) {
    Complex hop = 0.0;
    if (j > 0) hop += in[j - 1];
    if (j + 1 < L) hop += in[j + 1];
    out[j] = J * hop + (eps[j] - U * std::norm(in[j])) * in[j];
  }
}

ComplexVector apply_hamiltonian(const ModelParams& p, const LatticeState& state) {
  const auto eps = onsite_energies(p);
  ComplexVector out(eps.size());
  apply_hamiltonian(p.J, eps, p.U, state.amplitudes(), out);
  return out;
}

double participation_ratio(std::span<const double> density) {
  double s2 = 0.0;
  for (double n : density) s2 += n * n;
  if (!(s2 > 0.0)) throw ConfigError("participation ratio of a zero-norm state");
  return 1.0 / (static_cast<double>(density.size()) * s2);
}

double participation_ratio(const LatticeState& state) {
  const auto n = state.density();
  return participation_ratio(n);
}

double momentum_width(std::span<const double> density, int center) {
  double d = 0.0;
  for (std::size_t j = 0; j < density.size(); ++j)
    d += std::abs(static_cast<double>(static_cast<int>(j) - center)) * density[j];
  return d;
}

double momentum_width(const LatticeState& state) {
  const auto n = state.density();
  return momentum_width(n, state.center());
}

double energy_functional(double J, std::span<const double> eps, double U,
                         std::span<const Complex> amps) {
  const std::size_t L = eps.size();
  if (amps.size() != L) throw ConfigError("state length does not match lattice size");
  double e = 0.0;
  for (std::size_t j = 0; j < L; ++j) {
    const double n = std::norm(amps[j]);
    e += eps[j] * n - 0.5 * U * n * n;
    if (j + 1 < L) e += 2.0 * J * std::real(std::conj(amps[j]) * amps[j + 1]);
  }
  return e;
}

double energy_functional(const ModelParams& p, const LatticeState& state) {
  return energy_functional(p.J, onsite_energies(p), p.U, state.amplitudes());
}

double chemical_potential(double J, std::span<const double> eps, double U,
                          std::span<const Complex> amps) {
  double s2 = 0.0;
  for (const auto& a : amps) s2 += std::norm(a) * std::norm(a);
  return energy_functional(J, eps, U, amps) - 0.5 * U * s2;
}

double chemical_potential(const ModelParams& p, const LatticeState& state) {
  return chemical_potential(p.J, onsite_energies(p), p.U, state.amplitudes());
}

ComplexVector energy_gradient(const ModelParams& p, const LatticeState& state, bool project) {
  ComplexVector h = apply_hamiltonian(p, state);
  const double mu = project ? chemical_potential(p, state) : 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) h[j] = 2.0 * (h[j] - mu * state.amplitudes()[j]);
  return h;
}

DensityHarmonics density_fourier_coefficients(const LatticeState& state, double beta,
                                              int max_harmonic, double phi) {
  if (max_harmonic < 1) throw ConfigError("max_harmonic must be at least 1");
  const auto n = state.density();
  const double L = static_cast<double>(n.size());
  DensityHarmonics h;
  h.mean = std::accumulate(n.begin(), n.end(), 0.0) / L;
  h.c.assign(static_cast<std::size_t>(max_harmonic), 0.0);
  for (int m = 1; m <= max_harmonic; ++m) {
    double s = 0.0;
    for (std::size_t j = 0; j < n.size(); ++j)
      s += n[j] * std::cos(m * (2.0 * std::numbers::pi * beta * static_cast<double>(j) + phi));
    h.c[static_cast<std::size_t>(m - 1)] = 2.0 * s / L;
  }
  return h;
}

}  // namespace nlaa
