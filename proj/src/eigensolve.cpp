#include "nlaa/eigensolve.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nlaa/errors.hpp"
#include "tridiagonal.hpp"

namespace nlaa {

namespace {

using RealVec = std::vector<double>;

// Real-valued versions of the Hamiltonian kernels; the stationary states of a
// real Hamiltonian can be chosen real, which halves the work in the solver.
void hamiltonian_real(double J, const RealVec& eps, double U, const RealVec& x, RealVec& out) {
  const std::size_t L = eps.size();
  for (std::size_t j = 0; j < L; ++j) {
    double hop = 0.0;
    if (j > 0) hop += x[j - 1];
    if (j + 1 < L) hop += x[j + 1];
    out[j] = J * hop + (eps[j] - U * x[j] * x[j]) * x[j];
  }
}

double energy_real(double J, const RealVec& eps, double U, const RealVec& x) {
  double e = 0.0;
  for (std::size_t j = 0; j < eps.size(); ++j) {
    const double n = x[j] * x[j];
    e += eps[j] * n - 0.5 * U * n * n;
    if (j + 1 < eps.size()) e += 2.0 * J * x[j] * x[j + 1];
  }
  return e;
}

double dot(const RealVec& a, const RealVec& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void normalize(RealVec& x) {
  const double n = std::sqrt(dot(x, x));
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("state norm collapsed or diverged");
  for (double& v : x) v /= n;
}

struct Stationarity {
  double mu;
  double res;
};

Stationarity stationarity(double J, const RealVec& eps, double U, const RealVec& x, RealVec& hx) {
  hamiltonian_real(J, eps, U, x, hx);
  const double mu = dot(x, hx);
  double res = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) res = std::max(res, std::abs(hx[j] - mu * x[j]));
  if (!std::isfinite(res)) throw NumericalError("non-finite residual in nonlinear solver");
  return {mu, res};
}

void fix_sign(RealVec& v) {
  std::size_t k = 0;
  for (std::size_t j = 1; j < v.size(); ++j)
    if (std::abs(v[j]) > std::abs(v[k]) + 1e-14) k = j;
  if (v[k] < 0.0)
    for (double& x : v) x = -x;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tridiagonal_eigen(double J,
                                                                  std::span<const double> diag) {
  const auto L = static_cast<Eigen::Index>(diag.size());
  Eigen::VectorXd d(L);
  Eigen::VectorXd e(std::max<Eigen::Index>(L - 1, 0));
  for (Eigen::Index i = 0; i < L; ++i) d(i) = diag[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < L; ++i) e(i) = J;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericalError("tridiagonal eigensolver did not converge");
  return es;
}

// Eigenvector of the fixed mean-field Hamiltonian tridiag(J; diag) nearest
// to `ref`, by two sweeps of Rayleigh-shifted inverse iteration. O(L) per call.
RealVec tracked_eigenvector(double J, const RealVec& diag, const RealVec& ref) {
  const std::size_t L = diag.size();
  RealVec y = ref, hy(L), shifted(L);
  for (int sweep = 0; sweep < 2; ++sweep) {
    hamiltonian_real(J, diag, 0.0, y, hy);
    double sigma = dot(y, hy);
    const double bump = 1e-13 * (1.0 + std::abs(sigma) + std::abs(J));
    RealVec rhs = y;
    for (int attempt = 0;; ++attempt) {
      for (std::size_t j = 0; j < L; ++j) shifted[j] = diag[j] - sigma;
      if (detail::solve_tridiagonal(shifted, J, rhs)) break;
      if (attempt > 3) throw NumericalError("inverse iteration hit a singular shift");
      sigma += bump;
      rhs = y;
    }
    normalize(rhs);
    if (dot(rhs, ref) < 0.0)
      for (double& v : rhs) v = -v;
    y.swap(rhs);
  }
  return y;
}

EigenSolution package(const RealVec& x, double J, const RealVec& eps, double U, double mu,
                      double res, int iterations, bool converged) {
  EigenSolution s;
  s.state = LatticeState::from_real(x);
  s.mu = mu;
  s.energy = energy_real(J, eps, U, x);
  s.residual = res;
  s.iterations = iterations;
  s.converged = converged;
  return s;
}

}  // namespace

std::string to_string(StateKind kind) {
  return kind == StateKind::ground ? "gs" : "es";
}

StateKind state_kind_from_string(const std::string& s) {
  if (s == "gs" || s == "ground") return StateKind::ground;
  if (s == "es" || s == "highest-excited" || s == "excited") return StateKind::highest_excited;
  throw ConfigError("unknown state kind '" + s + "' (expected gs or es)");
}

void SolverOptions::validate() const {
  if (!(residual_tol > 0.0)) throw ConfigError("residual_tol must be positive");
  if (!(imag_time_step > 0.0)) throw ConfigError("imag_time_step must be positive");
  if (!(mixing > 0.0 && mixing <= 1.0)) throw ConfigError("mixing must lie in (0, 1]");
  if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
}

Spectrum linear_spectrum(double J, std::span<const double> potential) {
  if (potential.empty()) throw ConfigError("empty potential");
  const auto es = tridiagonal_eigen(J, potential);
  Spectrum s;
  const auto L = potential.size();
  s.values.resize(L);
  s.vectors.assign(L, RealVec(L));
  for (std::size_t k = 0; k < L; ++k) {
    s.values[k] = es.eigenvalues()(static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < L; ++j)
      s.vectors[k][j] = es.eigenvectors()(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    fix_sign(s.vectors[k]);
  }
  return s;
}

std::vector<double> linear_ground_vector(double J, std::span<const double> potential) {
  const Spectrum s = linear_spectrum(J, potential);
  const double scale = std::max(1.0, std::abs(s.values.front()));
  std::size_t degenerate = 1;
  while (degenerate < s.values.size() && s.values[degenerate] - s.values[0] <= 1e-9 * scale)
    ++degenerate;
  if (degenerate == 1) return s.vectors[0];

  std::vector<std::size_t> order(potential.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return potential[a] < potential[b]; });
  for (std::size_t site : order) {
    RealVec v(potential.size(), 0.0);
    for (std::size_t k = 0; k < degenerate; ++k)
      for (std::size_t j = 0; j < v.size(); ++j) v[j] += s.vectors[k][site] * s.vectors[k][j];
    if (std::sqrt(dot(v, v)) > 1e-6) {
      normalize(v);
      fix_sign(v);
      return v;
    }
  }
  return s.vectors[0];
}

double residual(const ModelParams& p, const LatticeState& state, double mu) {
  const auto eps = onsite_energies(p);
  ComplexVector h(eps.size());
  apply_hamiltonian(p.J, eps, p.U, state.amplitudes(), h);
  double r = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) r = std::max(r, std::abs(h[j] - mu * state.amplitudes()[j]));
  return r;
}

EigenSolution nonlinear_ground_state(const ModelParams& p, const SolverOptions& opts) {
  p.validate();
  opts.validate();
  const RealVec eps = onsite_energies(p);
  const std::size_t L = eps.size();
  const double J = p.J;
  const double U = p.U;
  const double scale = 1.0 + std::abs(J) + std::abs(p.delta) + std::abs(U);

  RealVec x = linear_ground_vector(J, eps);
  RealVec hx(L), trial(L);
  std::vector<double> trace;

  auto st = stationarity(J, eps, U, x, hx);
  double E = energy_real(J, eps, U, x);
  if (opts.record_energy_trace) trace.push_back(E);
  int it = 0;
  auto finish = [&](bool converged) {
    EigenSolution s = package(x, J, eps, U, st.mu, st.res, it, converged);
    s.energy_trace = std::move(trace);
    return s;
  };
  if (st.res < opts.residual_tol) return finish(true);

  // Stage 1: normalized gradient flow x <- N[x - tau (H[x] x - mu x)]. A step
  // is accepted only if it does not raise E; otherwise tau is halved.
  const double slack = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  auto imaginary_time = [&](double target, int budget) {
    double tau = opts.imag_time_step;
    const int stop = std::min(opts.max_iterations, it + budget);
    while (it < stop && st.res >= target) {
      ++it;
      for (std::size_t j = 0; j < L; ++j) trial[j] = x[j] - tau * (hx[j] - st.mu * x[j]);
      normalize(trial);
      const double Et = energy_real(J, eps, U, trial);
      if (!std::isfinite(Et)) throw NumericalError("non-finite energy in imaginary-time step");
      if (Et <= E + slack) {
        x.swap(trial);
        E = Et;
        if (opts.record_energy_trace) trace.push_back(E);
        st = stationarity(J, eps, U, x, hx);
        tau = std::min(opts.imag_time_step, tau * 1.25);
      } else {
        tau *= 0.5;
        if (tau < 1e-14) break;
      }
    }
  };
  imaginary_time(std::max(opts.handoff_residual, opts.residual_tol), opts.max_iterations / 2);
  if (st.res < opts.residual_tol) return finish(true);

  // Later stages may only polish the state the flow selected: a candidate is
  // kept if it lowers the residual without raising the energy.
  const RealVec x_flow = x;
  const double E_flow = E;
  auto consider = [&](const RealVec& y) {
    RealVec hy(L);
    const auto sy = stationarity(J, eps, U, y, hy);
    const double Ey = energy_real(J, eps, U, y);
    if (sy.res < st.res && Ey <= E_flow + 1e-9 * scale) {
      x = y;
      st = sy;
      hx.swap(hy);
      E = Ey;
    }
  };

  // Stage 2: self-consistent refinement. Each pass follows the eigenvector of
  // H0 - U diag(n) nearest the current state and mixes the density linearly.
  if (U != 0.0) {
    RealVec n(L), diag(L), y = x;
    for (std::size_t j = 0; j < L; ++j) n[j] = x[j] * x[j];
    int stalled = 0;
    for (int k = 0; k < opts.max_refine_iterations && it < opts.max_iterations; ++k) {
      ++it;
      for (std::size_t j = 0; j < L; ++j) diag[j] = eps[j] - U * n[j];
      y = tracked_eigenvector(J, diag, y);
      const double before = st.res;
      consider(y);
      if (st.res < opts.residual_tol) return finish(true);
      stalled = st.res < before ? 0 : stalled + 1;
      if (stalled > 25) break;
      for (std::size_t j = 0; j < L; ++j) n[j] = (1.0 - opts.mixing) * n[j] + opts.mixing * y[j] * y[j];
    }
  }

  // Stage 3: Newton polish on F(x, mu) = (H[x] x - mu x, (1 - x.x)/2).
  {
    const auto n1 = static_cast<Eigen::Index>(L + 1);
    RealVec y = x;
    double mu = st.mu;
    for (int k = 0; k < 30 && it < opts.max_iterations; ++k) {
      ++it;
      Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n1, n1);
      Eigen::VectorXd f(n1);
      double fmax = 0.0;
      for (std::size_t j = 0; j < L; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        double hop = 0.0;
        if (j > 0) {
          hop += y[j - 1];
          jac(jj, jj - 1) = J;
        }
        if (j + 1 < L) {
          hop += y[j + 1];
          jac(jj, jj + 1) = J;
        }
        f(jj) = J * hop + (eps[j] - U * y[j] * y[j] - mu) * y[j];
        fmax = std::max(fmax, std::abs(f(jj)));
        jac(jj, jj) = eps[j] - 3.0 * U * y[j] * y[j] - mu;
        jac(jj, n1 - 1) = -y[j];
        jac(n1 - 1, jj) = -y[j];
      }
      f(n1 - 1) = 0.5 * (1.0 - dot(y, y));
      if (fmax < 0.1 * opts.residual_tol) break;
      const Eigen::VectorXd d = jac.partialPivLu().solve(-f);
      if (!d.allFinite()) break;
      for (std::size_t j = 0; j < L; ++j) y[j] += d(static_cast<Eigen::Index>(j));
      mu += d(n1 - 1);
    }
    if (std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); })) {
      normalize(y);
      consider(y);
    }
    if (st.res < opts.residual_tol) return finish(true);
  }

  // Fallback: continue the gradient flow to the requested tolerance.
  imaginary_time(opts.residual_tol, opts.max_iterations);
  return finish(st.res < opts.residual_tol);
}

EigenSolution nonlinear_excited_state(const ModelParams& p, const SolverOptions& opts) {
  EigenSolution s = nonlinear_ground_state(p.negated(), opts);
  s.mu = -s.mu;
  s.energy = -s.energy;
  for (double& e : s.energy_trace) e = -e;
  s.kind = StateKind::highest_excited;
  return s;
}

EigenSolution solve_state(const ModelParams& p, StateKind kind, const SolverOptions& opts) {
  return kind == StateKind::ground ? nonlinear_ground_state(p, opts) : nonlinear_excited_state(p, opts);
}

}  // namespace nlaa
