#include "nlaa/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "nlaa/errors.hpp"
#include "nlaa/io.hpp"

namespace nlaa {

namespace {

constexpr Complex kMinusI{0.0, -1.0};

struct Rk4 {
  explicit Rk4(std::size_t L) : k1(L), k2(L), k3(L), k4(L), tmp(L) {}
  ComplexVector k1, k2, k3, k4, tmp;

  // psi <- psi + dt/6 (k1 + 2k2 + 2k3 + k4), with k = -i H[psi] psi.
  void step(double J, const std::vector<double>& eps, double U, double dt, ComplexVector& psi) {
    const std::size_t L = psi.size();
    auto rhs = [&](const ComplexVector& in, ComplexVector& out) {
      apply_hamiltonian(J, eps, U, in, out);
      for (auto& v : out) v *= kMinusI;
    };
    rhs(psi, k1);
    for (std::size_t j = 0; j < L; ++j) tmp[j] = psi[j] + 0.5 * dt * k1[j];
    rhs(tmp, k2);
    for (std::size_t j = 0; j < L; ++j) tmp[j] = psi[j] + 0.5 * dt * k2[j];
    rhs(tmp, k3);
    for (std::size_t j = 0; j < L; ++j) tmp[j] = psi[j] + dt * k3[j];
    rhs(tmp, k4);
    for (std::size_t j = 0; j < L; ++j) psi[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
};

double norm2(const ComplexVector& psi) {
  double s = 0.0;
  for (const auto& a : psi) s += std::norm(a);
  return s;
}

Snapshot snap(double t, double J, const std::vector<double>& eps, double U, const ComplexVector& psi,
              int center, bool keep_density) {
  Snapshot s;
  s.t = t;
  std::vector<double> n(psi.size());
  for (std::size_t j = 0; j < psi.size(); ++j) n[j] = std::norm(psi[j]);
  const double total = norm2(psi);
  s.norm_drift = std::abs(total - 1.0);
  s.r = participation_ratio(n);
  s.width = momentum_width(n, center);
  s.energy = energy_functional(J, eps, U, psi);
  if (keep_density) s.density = std::move(n);
  return s;
}

// Shared loop. `hopping(t_mid)` supplies J for the step [t, t + dt].
template <class Hopping>
void integrate(const std::vector<double>& eps, double U, ComplexVector& psi, double t0, double t1,
               const EvolveOptions& opts, int center, Hopping hopping, Trajectory& tr, bool track_energy) {
  const long steps = std::lround(std::ceil((t1 - t0) / opts.dt - 1e-9));
  const double dt = steps > 0 ? (t1 - t0) / static_cast<double>(steps) : 0.0;
  Rk4 rk(psi.size());
  const double e0 = energy_functional(hopping(t0), eps, U, psi);
  for (long s = 1; s <= steps; ++s) {
    const double t = t0 + static_cast<double>(s - 1) * dt;
    const double J = hopping(t + 0.5 * dt);
    rk.step(J, eps, U, dt, psi);
    const double drift = std::abs(norm2(psi) - 1.0);
    if (!std::isfinite(drift)) throw NumericalError("non-finite amplitudes during time evolution");
    tr.max_norm_drift = std::max(tr.max_norm_drift, drift);
    if (drift > opts.abort_drift)
      throw NumericalError("norm drift " + fmt(drift) + " at t=" + fmt(t + dt) +
                           " exceeds the audit limit; reduce dt");
    if (track_energy)
      tr.max_energy_drift = std::max(tr.max_energy_drift, std::abs(energy_functional(J, eps, U, psi) - e0));
    if (s % opts.snapshot_stride == 0 || s == steps) {
      const double tn = (s == steps) ? t1 : t0 + static_cast<double>(s) * dt;
      tr.frames.push_back(snap(tn, hopping(tn), eps, U, psi, center, opts.keep_density));
    }
  }
}

}  // namespace

void EvolveOptions::validate() const {
  if (!(dt > 0.0) || dt > 0.01) throw ConfigError("dt must lie in (0, 0.01] hbar/J");
  if (snapshot_stride < 1) throw ConfigError("snapshot_stride must be positive");
  if (!(abort_drift > 0.0)) throw ConfigError("abort_drift must be positive");
}

void RampProtocol::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("ramp duration must be positive");
  if (!(hold >= 0.0) || !std::isfinite(hold)) throw ConfigError("hold time must be nonnegative");
}

Trajectory evolve(const ModelParams& p, const LatticeState& initial, double t_final,
                  const EvolveOptions& opts) {
  p.validate();
  opts.validate();
  if (initial.size() != p.L) throw ConfigError("initial state length does not match L");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be nonnegative");
  const auto eps = onsite_energies(p);
  ComplexVector psi(initial.amplitudes().begin(), initial.amplitudes().end());
  Trajectory tr;
  tr.frames.push_back(snap(0.0, p.J, eps, p.U, psi, initial.center(), opts.keep_density));
  integrate(eps, p.U, psi, 0.0, t_final, opts, initial.center(), [&](double) { return p.J; }, tr, true);
  tr.final_state = LatticeState(psi, initial.center());
  return tr;
}

Trajectory transport_experiment(const ModelParams& p, double t_final, const EvolveOptions& opts) {
  p.validate();
  return evolve(p, LatticeState::site(p.L, (p.L - 1) / 2), t_final, opts);
}

RampResult ramp_prepare(const ModelParams& target, const RampProtocol& protocol,
                        const EvolveOptions& opts) {
  target.validate();
  protocol.validate();
  opts.validate();
  const auto eps = onsite_energies(target);
  // J = 0 ground state of H (or of -H): the extremal site, lower index on ties.
  const bool ground = protocol.target == StateKind::ground;
  int site = 0;
  for (int j = 1; j < target.L; ++j) {
    const double a = eps[static_cast<std::size_t>(j)];
    const double b = eps[static_cast<std::size_t>(site)];
    if (ground ? a < b : a > b) site = j;
  }
  ComplexVector psi(static_cast<std::size_t>(target.L), Complex{0.0, 0.0});
  psi[static_cast<std::size_t>(site)] = 1.0;
  const int center = (target.L - 1) / 2;

  RampResult out;
  out.initial_site = site;
  Trajectory& tr = out.trajectory;
  tr.frames.push_back(snap(0.0, 0.0, eps, target.U, psi, center, opts.keep_density));
  const double T = protocol.duration;
  integrate(eps, target.U, psi, 0.0, T, opts, center,
            [&](double t) { return target.J * std::clamp(t / T, 0.0, 1.0); }, tr, false);
  if (protocol.hold > 0.0)
    integrate(eps, target.U, psi, T, T + protocol.hold, opts, center, [&](double) { return target.J; },
              tr, false);
  tr.final_state = LatticeState(psi, center);
  out.state = tr.final_state;
  return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  CsvWriter w(os);
  std::vector<std::string> cols{"t"};
  const std::size_t L = tr.frames.empty() ? 0 : tr.frames.front().density.size();
  for (std::size_t j = 0; j < L; ++j) cols.push_back("n_" + std::to_string(j));
  for (const char* c : {"r", "d", "E", "norm_drift"}) cols.emplace_back(c);
  w.header(cols);
  for (const auto& f : tr.frames) {
    w.cell(f.t);
    for (double n : f.density) w.cell(n);
    w.cell(f.r).cell(f.width).cell(f.energy).cell(f.norm_drift);
    w.end_row();
  }
}

}  // namespace nlaa
