#include "nlaa/scan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>
#include <unordered_map>

#include "nlaa/errors.hpp"
#include "nlaa/io.hpp"
#include "pool.hpp"

namespace nlaa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::mutex g_rc_mu;
std::map<std::tuple<int, double, double>, double> g_rc_cache;

std::string cell_key(const CellRecipe& rc, double delta, double U) {
  return to_string(rc.kind) + "|" + std::to_string(rc.L) + "|" + fmt_exact(U) + "|" + fmt_exact(delta) + "|" +
         to_string(rc.preparation) + "|" + fmt_exact(rc.phi) + "|" + fmt_exact(rc.beta);
}

// Append-only JSON-lines store. Loading tolerates a torn final line.
class CellStore {
 public:
  explicit CellStore(std::optional<std::filesystem::path> path) : path_(std::move(path)) {
    if (!path_ || !std::filesystem::exists(*path_)) return;
    std::ifstream in(*path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("key")) continue;
      CellValue v;
      v.valid = j.value("valid", false);
      v.r = v.valid ? j.at("r").get<double>() : kNaN;
      v.mu = j.value("mu", kNaN);
      v.energy = j.value("E", kNaN);
      v.residual = j.value("residual", kNaN);
      cells_[j.at("key").get<std::string>()] = v;
    }
  }

  std::optional<CellValue> find(const std::string& key) const {
    auto it = cells_.find(key);
    if (it == cells_.end()) return std::nullopt;
    return it->second;
  }

  void put(const std::string& key, const CellValue& v) {
    std::lock_guard lk(mu_);
    if (!path_) return;
    if (!out_.is_open()) {
      if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
      out_.open(*path_, std::ios::app);
      if (!out_) throw ConfigError("cannot open scan store " + path_->string());
    }
    json j = {{"key", key}, {"valid", v.valid}};
    if (v.valid) {
      j["r"] = v.r;
      j["mu"] = v.mu;
      j["E"] = v.energy;
      j["residual"] = v.residual;
    }
    out_ << j.dump() << '\n';
    out_.flush();
  }

 private:
  std::optional<std::filesystem::path> path_;
  std::unordered_map<std::string, CellValue> cells_;
  std::mutex mu_;
  std::ofstream out_;
};

}  // namespace

double critical_r(int L, double phi, double beta) {
  const auto key = std::make_tuple(L, phi, beta);
  {
    std::lock_guard lk(g_rc_mu);
    if (auto it = g_rc_cache.find(key); it != g_rc_cache.end()) return it->second;
  }
  ModelParams p;
  p.L = L;
  p.phi = phi;
  p.beta = beta;
  p.delta = 2.0;
  p.validate();
  const auto v = linear_ground_vector(p.J, onsite_energies(p));
  std::vector<double> n(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) n[j] = v[j] * v[j];
  const double r = participation_ratio(n);
  std::lock_guard lk(g_rc_mu);
  g_rc_cache.emplace(key, r);
  return r;
}

std::string to_string(Preparation p) { return p == Preparation::exact ? "exact" : "ramped"; }

Preparation preparation_from_string(const std::string& s) {
  if (s == "exact") return Preparation::exact;
  if (s == "ramped") return Preparation::ramped;
  throw ConfigError("unknown preparation '" + s + "' (expected exact or ramped)");
}

ModelParams CellRecipe::params(double delta, double U) const {
  ModelParams p;
  p.L = L;
  p.phi = phi;
  p.beta = beta;
  p.delta = delta;
  p.U = U;
  return p;
}

PreparedState prepare_state(const CellRecipe& recipe, double delta, double U) {
  const ModelParams p = recipe.params(delta, U);
  PreparedState out;
  if (recipe.preparation == Preparation::exact) {
    auto s = solve_state(p, recipe.kind, recipe.solver);
    out.state = std::move(s.state);
    out.mu = s.mu;
    out.energy = s.energy;
    out.residual = s.residual;
    out.converged = s.converged;
  } else {
    RampProtocol ramp = recipe.ramp;
    ramp.target = recipe.kind;
    EvolveOptions eo = recipe.evolve;
    eo.keep_density = false;
    eo.snapshot_stride = std::numeric_limits<int>::max();
    out.state = ramp_prepare(p, ramp, eo).state;
    out.mu = chemical_potential(p, out.state);
    out.energy = energy_functional(p, out.state);
    out.residual = residual(p, out.state, out.mu);
  }
  return out;
}

CellValue evaluate_cell(const CellRecipe& recipe, double delta, double U) {
  CellValue v;
  try {
    const auto s = prepare_state(recipe, delta, U);
    v.r = participation_ratio(s.state);
    v.mu = s.mu;
    v.energy = s.energy;
    v.residual = s.residual;
    v.valid = s.converged;
  } catch (const NumericalError&) {
    v.valid = false;
  }
  if (!v.valid) v.r = kNaN;
  return v;
}

double Transition::effective() const {
  switch (status) {
    case Status::found: return delta_c;
    case Status::above_window: return std::numeric_limits<double>::infinity();
    case Status::below_window: return -std::numeric_limits<double>::infinity();
    case Status::invalid: break;
  }
  return kNaN;
}

std::string Transition::describe() const {
  switch (status) {
    case Status::found: return "found";
    case Status::above_window: return "above_window";
    case Status::below_window: return "below_window";
    case Status::invalid: break;
  }
  return "invalid";
}

Transition detect_transition(const std::vector<double>& deltas, const std::vector<double>& r, double rc,
                             const std::function<double(double)>& resolve, double tol) {
  if (deltas.size() != r.size()) throw ConfigError("r curve and Delta grid differ in length");
  if (!(tol > 0.0)) throw ConfigError("bisection tolerance must be positive");
  Transition t;
  if (!deltas.empty()) {
    t.window_lo = deltas.front();
    t.window_hi = deltas.back();
  }
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (std::isfinite(r[i])) ok.push_back(i);
  if (ok.empty()) return t;

  for (std::size_t k = 0; k + 1 < ok.size(); ++k) {
    const std::size_t a = ok[k], b = ok[k + 1];
    if (!(r[a] > rc && r[b] <= rc)) continue;
    double lo = deltas[a], hi = deltas[b];
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      const double rm = resolve ? resolve(mid) : kNaN;
      if (!std::isfinite(rm)) break;
      (rm > rc ? lo : hi) = mid;
    }
    t.crossings.push_back(0.5 * (lo + hi));
  }
  if (!t.crossings.empty()) {
    t.status = Transition::Status::found;
    t.delta_c = t.crossings.front();
  } else {
    t.status = r[ok.front()] > rc ? Transition::Status::above_window : Transition::Status::below_window;
  }
  return t;
}

Transition find_transition(const CellRecipe& recipe, double U, const std::vector<double>& deltas, double rc,
                           double tol) {
  std::vector<double> r(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) r[i] = evaluate_cell(recipe, deltas[i], U).r;
  return detect_transition(deltas, r, rc, [&](double d) { return evaluate_cell(recipe, d, U).r; }, tol);
}

void ScanGrid::validate() const {
  auto increasing = [](const std::vector<double>& v) {
    return !v.empty() && std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  if (!increasing(delta_over_j)) throw ConfigError("Delta/J samples must be nonempty and strictly increasing");
  if (!increasing(u_over_j)) throw ConfigError("U/J samples must be nonempty and strictly increasing");
  recipe.params(delta_over_j.front(), u_over_j.front()).validate();
  recipe.solver.validate();
}

ScanResult scan_phase_diagram(const ScanGrid& grid, const ScanOptions& opts) {
  grid.validate();
  ScanResult res;
  res.grid = grid;
  res.r_c = critical_r(grid.recipe.L, grid.recipe.phi, grid.recipe.beta);
  const std::size_t nu = grid.u_over_j.size(), nd = grid.delta_over_j.size();
  res.cells.assign(nu, std::vector<CellValue>(nd));

  CellStore store(opts.store);
  std::vector<std::size_t> todo;
  for (std::size_t k = 0; k < nu * nd; ++k) {
    const double U = grid.u_over_j[k / nd], D = grid.delta_over_j[k % nd];
    if (auto hit = store.find(cell_key(grid.recipe, D, U))) {
      res.cells[k / nd][k % nd] = *hit;
      ++res.reused_cells;
    } else {
      todo.push_back(k);
    }
  }
  detail::parallel_for(todo.size(), opts.workers, [&](std::size_t i) {
    const std::size_t k = todo[i];
    const double U = grid.u_over_j[k / nd], D = grid.delta_over_j[k % nd];
    const CellValue v = evaluate_cell(grid.recipe, D, U);
    res.cells[k / nd][k % nd] = v;
    store.put(cell_key(grid.recipe, D, U), v);
  });

  res.transitions.resize(nu);
  detail::parallel_for(nu, opts.workers, [&](std::size_t iu) {
    std::vector<double> r(nd);
    for (std::size_t id = 0; id < nd; ++id) r[id] = res.cells[iu][id].r;
    const double U = grid.u_over_j[iu];
    std::function<double(double)> resolve;
    if (opts.refine_transitions) resolve = [&](double d) { return evaluate_cell(grid.recipe, d, U).r; };
    res.transitions[iu] = detect_transition(grid.delta_over_j, r, res.r_c, resolve, opts.bisection_tol);
  });
  return res;
}

std::vector<double> linspace_step(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("grid needs step > 0 and hi >= lo");
  const long n = std::lround(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n + 1));
  // Index-based so that samples are reproducible and land exactly on round values.
  for (long i = 0; i <= n; ++i) v.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
  return v;
}

std::string to_string(Phase p) {
  switch (p) {
    case Phase::I: return "I";
    case Phase::II: return "II";
    case Phase::III: return "III";
    case Phase::IV: return "IV";
  }
  return "?";
}

Phase classify_phase(double delta, double u, double dc_gs, double dc_es) {
  if (std::isnan(dc_gs) || std::isnan(dc_es)) throw ConfigError("phase classification needs both boundaries");
  const double lo = std::min(dc_gs, dc_es), hi = std::max(dc_gs, dc_es);
  if (delta > hi) return Phase::II;
  if (delta < lo) return Phase::IV;
  if (u < 0.0) return Phase::I;
  if (u > 0.0) return Phase::III;
  return dc_gs < dc_es ? Phase::III : Phase::I;
}

void write_r_matrix_csv(std::ostream& os, const ScanResult& res) {
  CsvWriter w(os);
  std::vector<std::string> cols{"u_over_j"};
  for (double d : res.grid.delta_over_j) cols.push_back(fmt(d));
  w.header(cols);
  for (std::size_t iu = 0; iu < res.cells.size(); ++iu) {
    w.cell(res.grid.u_over_j[iu]);
    for (const auto& c : res.cells[iu]) w.cell(c.r);
    w.end_row();
  }
}

void write_transitions_csv(std::ostream& os, const std::vector<ScanResult>& results) {
  CsvWriter w(os);
  w.header({"kind", "L", "u_over_j", "status", "delta_c_over_j", "crossings", "r_c"});
  for (const auto& res : results) {
    for (std::size_t iu = 0; iu < res.transitions.size(); ++iu) {
      const auto& t = res.transitions[iu];
      std::string xs;
      for (double x : t.crossings) xs += (xs.empty() ? "" : ";") + fmt(x);
      w.cell(to_string(res.grid.recipe.kind)).cell(res.grid.recipe.L).cell(res.grid.u_over_j[iu]);
      w.cell(t.describe()).cell(t.found() ? t.delta_c : kNaN).cell(xs).cell(res.r_c);
      w.end_row();
    }
  }
}

}  // namespace nlaa
