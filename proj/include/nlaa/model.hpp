#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace nlaa {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline const double kGoldenConjugate = (std::sqrt(5.0) - 1.0) / 2.0;

/// Parameters of the nonlinear Aubry-Andre chain
///   i d/dt phi_j = J (phi_{j+1} + phi_{j-1}) + Delta cos(2 pi beta j + phi) phi_j - U |phi_j|^2 phi_j
/// on sites j = 0..L-1 with hard-wall boundaries. Energies are in units of the
/// reference coupling, so J is usually +1 (or -1 for the negated Hamiltonian).
struct ModelParams {
  int L = 21;
  double J = 1.0;
  double delta = 0.0;
  double beta = kGoldenConjugate;
  double phi = 0.0;
  double U = 0.0;

  // Throws ConfigError on L < 2, beta outside (0,1), or non-finite energies.
  void validate() const;

  // |U/J| > 1.5: outside the weak-interaction regime, self-trapping possible.
  bool self_trapping_risk() const;

  // (J, Delta, U) -> (-J, -Delta, -U); the ground state of the result is the
  // highest excited state of *this.
  ModelParams negated() const;

  bool operator==(const ModelParams&) const = default;
};

/// Phase that makes the on-site term odd under the mirror j -> L-1-j, so that
/// Delta -> -Delta is a lattice symmetry and the noninteracting ground and
/// highest excited states are mirror images with equal participation ratio.
double mirror_odd_phase(int L, double beta = kGoldenConjugate);

/// Normalized amplitude vector. Every constructor renormalizes to unit norm.
class LatticeState {
 public:
  LatticeState() = default;
  // Throws ConfigError on empty or zero-norm input. center < 0 selects (L-1)/2.
  explicit LatticeState(ComplexVector amplitudes, int center = -1);
  static LatticeState from_real(std::span<const double> amplitudes, int center = -1);
  static LatticeState site(int L, int j, int center = -1);
  static LatticeState uniform(int L, int center = -1);

  int size() const { return static_cast<int>(amps_.size()); }
  int center() const { return center_; }
  std::span<const Complex> amplitudes() const { return amps_; }
  const Complex& operator[](int j) const { return amps_[static_cast<std::size_t>(j)]; }

  std::vector<double> density() const;
  double norm_squared() const;

 private:
  ComplexVector amps_;
  int center_ = 0;
};

double quasiperiodic_potential(const ModelParams& p, int j);
std::vector<double> onsite_energies(const ModelParams& p);

// out_j = J (in_{j+1} + in_{j-1}) + eps_j in_j - U |in_j|^2 in_j, open boundaries.
void apply_hamiltonian(double J, std::span<const double> eps, double U,
                       std::span<const Complex> in, std::span<Complex> out);
ComplexVector apply_hamiltonian(const ModelParams& p, const LatticeState& state);

double participation_ratio(std::span<const double> density);
double participation_ratio(const LatticeState& state);

// sum_j |j - center| n_j
double momentum_width(std::span<const double> density, int center);
double momentum_width(const LatticeState& state);

/// E[phi] = sum_j [ J (phi_j^* phi_{j+1} + c.c.) + eps_j n_j - (U/2) n_j^2 ].
/// Its gradient on the unit sphere is H[phi] phi - mu phi.
double energy_functional(double J, std::span<const double> eps, double U,
                         std::span<const Complex> amps);
double energy_functional(const ModelParams& p, const LatticeState& state);

/// mu = <phi| H[phi] phi> = E[phi] - (U/2) sum_j n_j^2.
double chemical_potential(double J, std::span<const double> eps, double U,
                          std::span<const Complex> amps);
double chemical_potential(const ModelParams& p, const LatticeState& state);

/// Gradient of E with respect to the real and imaginary parts of every amplitude,
/// packed as g_j = dE/dRe(phi_j) + i dE/dIm(phi_j) = 2 (H[phi] phi)_j. With
/// project = true the radial part is removed, leaving 2 (H[phi] phi - mu phi),
/// the gradient on the unit sphere.
ComplexVector energy_gradient(const ModelParams& p, const LatticeState& state, bool project = false);

/// Cosine-series amplitudes of the density along the quasiperiodic phase:
///   mean = (1/L) sum_j n_j,
///   c[m-1] = (2/L) sum_j n_j cos(m (2 pi beta j + phi)),  m = 1..max_harmonic.
/// With phi = 0 this is the plain (2/L) sum_j n_j cos(2 pi beta m j).
struct DensityHarmonics {
  double mean = 0.0;
  std::vector<double> c;
  static constexpr const char* kConvention = "c_m=(2/L)*sum_j n_j*cos(m*(2*pi*beta*j+phi))";
};
DensityHarmonics density_fourier_coefficients(const LatticeState& state, double beta,
                                              int max_harmonic, double phi = 0.0);

}  // namespace nlaa
