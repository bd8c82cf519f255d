#include "run_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "nlaa/errors.hpp"

namespace nlaa::cli {

namespace {

json grid3(double lo, double hi, double step) { return json::array({lo, hi, step}); }

json model_defaults() {
  return {{"L", 21},   {"J", 1.0},      {"delta_over_j", 1.0}, {"u_over_j", 0.0},
          {"phi", 0.0}, {"beta", kGoldenConjugate}, {"coupling_hz", 275.0}};
}

json model_si_defaults() {
  return {{"L", 21},
          {"coupling_hz", 275.0},
          {"delta_hz", 0.0},
          {"scattering_length_bohr", 0.0},
          {"density_per_cm3", 2e13},
          {"mass_kg", si::kCs133Mass},
          {"phi", 0.0},
          {"beta", kGoldenConjugate}};
}

json base_defaults() {
  const SolverOptions so;
  const char* env = std::getenv(kOutDirEnv);
  return {
      {"model", model_defaults()},
      {"kind", "gs"},
      {"preparation", "exact"},
      {"solver",
       {{"residual_tol", so.residual_tol},
        {"max_iterations", so.max_iterations},
        {"imag_time_step", so.imag_time_step},
        {"mixing", so.mixing}}},
      {"evolve", {{"t_final", 4.0}, {"dt", 1e-3}, {"snapshot_stride", 100}}},
      {"ramp", {{"velocity_hz_per_ms", 275.0}, {"hold_ms", 0.0}}},
      {"scan", {{"delta_over_j", grid3(0.0, 4.0, 0.05)}, {"u_over_j", grid3(-1.0, 1.0, 0.1)}, {"store", nullptr}}},
      {"u_values", json::array({-0.8, 0.0, 0.8})},
      {"energy_definition", "mu"},
      {"gaa", {{"alpha", 0.3}}},
      {"fit",
       {{"input", nullptr},
        {"bootstrap", 200},
        {"noise_sigma", 0.01},
        {"floor", 0.0},
        {"delta_over_j", grid3(0.2, 4.0, 0.1)}}},
      {"bragg", {{"recoil_khz", 5.3}}},
      {"seed", kDefaultSeed},
      {"workers", 1},
      {"out", env && *env ? std::string(env) : std::string("nlaa-out")},
  };
}

json command_defaults(const std::string& cmd) {
  json d = base_defaults();
  if (cmd == "scan" || cmd == "phases" || cmd == "alpha-star") d["model"]["phi"] = "mirror";
  if (cmd == "alpha-star") {
    d["u_values"] = json::array({-0.25, -0.2, -0.15, -0.1, -0.05, 0.0, 0.05, 0.1, 0.15, 0.2, 0.25});
    d["scan"]["delta_over_j"] = grid3(0.5, 4.0, 0.05);
  }
  if (cmd == "interaction-sweep") {
    d["evolve"]["t_final"] = 2.0;
  }
  if (cmd == "gaa-me") d["model"]["L"] = 987;
  if (cmd == "bragg-schedule") d["model"]["delta_over_j"] = 0.0;
  if (cmd == "fit") d["preparation"] = "ramped";
  return d;
}

// Rejects keys that the template does not know, recursing into objects.
void check_keys(const json& given, const json& tmpl, const std::string& where) {
  if (!given.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    if (!tmpl.contains(it.key())) throw ConfigError("unknown configuration key '" + path + "'");
    const auto& t = tmpl.at(it.key());
    if (t.is_object() && !it.value().is_null()) check_keys(it.value(), t, path);
  }
}

template <class T>
T get(const json& j, const std::string& path) {
  const json* cur = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (!cur->is_object() || !cur->contains(key)) throw ConfigError("missing configuration key '" + path + "'");
    cur = &cur->at(key);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  try {
    return cur->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("configuration key '" + path + "' has the wrong type (" + cur->dump() + ")");
  }
}

std::vector<double> grid_from(const json& j, const std::string& path) {
  const auto v = get<std::vector<double>>(j, path);
  if (v.size() != 3) throw ConfigError("'" + path + "' must be [lo, hi, step]");
  return linspace_step(v[0], v[1], v[2]);
}

double phi_from(const json& v, int L, double beta, const std::string& path) {
  if (v.is_string()) {
    if (v.get<std::string>() == "mirror") return mirror_odd_phase(L, beta);
    try {
      std::size_t used = 0;
      const double x = std::stod(v.get<std::string>(), &used);
      if (used == v.get<std::string>().size()) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError("'" + path + "' must be a number (radians) or \"mirror\"");
  }
  if (!v.is_number()) throw ConfigError("'" + path + "' must be a number (radians) or \"mirror\"");
  return v.get<double>();
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"solve", "evolve", "interaction-sweep", "ramp", "scan",
                                              "phases", "alpha-star", "gaa-me", "fit", "bragg-schedule"};
  return names;
}

RunConfig build_config(const std::string& command, const std::optional<std::filesystem::path>& config_file,
                       const Overrides& ov) {
  json file = json::object();
  if (config_file) {
    std::ifstream in(*config_file);
    if (!in) throw ConfigError("cannot open config file " + config_file->string());
    file = json::parse(in, nullptr, false, true);
    if (file.is_discarded()) throw ConfigError("config file " + config_file->string() + " is not valid JSON");
  }
  return build_config(command, std::move(file), ov);
}

RunConfig build_config(const std::string& command, json file, const Overrides& ov) {
  if (std::find(subcommands().begin(), subcommands().end(), command) == subcommands().end())
    throw ConfigError("unknown subcommand '" + command + "'");
  json cfg = command_defaults(command);
  json tmpl = cfg;
  tmpl["model_si"] = model_si_defaults();
  tmpl["command"] = command;
  check_keys(file, tmpl, "");
  if (file.contains("command") && file["command"] != command)
    throw ConfigError("config file is for '" + file["command"].dump() + "', not '" + command + "'");
  file.erase("command");

  const bool si = file.contains("model_si");
  if (si && file.contains("model")) throw ConfigError("give either 'model' or 'model_si', not both");
  if (si) {
    cfg.erase("model");
    cfg["model_si"] = model_si_defaults();
    if (command == "gaa-me") cfg["model_si"]["L"] = 987;
    if (command == "scan" || command == "phases" || command == "alpha-star") cfg["model_si"]["phi"] = "mirror";
  }
  cfg.merge_patch(file);
  const std::string mkey = si ? "model_si" : "model";

  if (ov.L) cfg[mkey]["L"] = *ov.L;
  if (ov.phi) cfg[mkey]["phi"] = *ov.phi;
  if (ov.delta_over_j || ov.u_over_j) {
    if (si) throw ConfigError("--delta-over-j/--u-over-j conflict with an SI 'model_si' block");
    if (ov.delta_over_j) cfg["model"]["delta_over_j"] = *ov.delta_over_j;
    if (ov.u_over_j) cfg["model"]["u_over_j"] = *ov.u_over_j;
  }
  if (ov.kind) cfg["kind"] = *ov.kind;
  if (ov.preparation) cfg["preparation"] = *ov.preparation;
  if (ov.seed) cfg["seed"] = *ov.seed;
  if (ov.workers) cfg["workers"] = *ov.workers;
  if (ov.out) cfg["out"] = *ov.out;

  RunConfig rc;
  rc.command = command;
  rc.si_input = si;
  ModelParams& p = rc.model;
  p.L = get<int>(cfg, mkey + ".L");
  p.beta = get<double>(cfg, mkey + ".beta");
  rc.units.coupling_hz = get<double>(cfg, mkey + ".coupling_hz");
  rc.units.validate();
  if (si) {
    p.J = 1.0;
    p.delta = rc.units.energy_from_hz(get<double>(cfg, "model_si.delta_hz"));
    InteractionConversion conv;
    conv.scattering_length_bohr = get<double>(cfg, "model_si.scattering_length_bohr");
    conv.density_per_cm3 = get<double>(cfg, "model_si.density_per_cm3");
    conv.mass_kg = get<double>(cfg, "model_si.mass_kg");
    p.U = scattering_length_to_U(conv, rc.units);
  } else {
    p.J = get<double>(cfg, "model.J");
    p.delta = get<double>(cfg, "model.delta_over_j");
    p.U = get<double>(cfg, "model.u_over_j");
  }
  if (p.L < 2) throw ConfigError("L must be at least 2");
  p.phi = phi_from(cfg[mkey]["phi"], p.L, p.beta, mkey + ".phi");
  p.validate();

  rc.kind = state_kind_from_string(get<std::string>(cfg, "kind"));
  rc.preparation = preparation_from_string(get<std::string>(cfg, "preparation"));
  rc.solver.residual_tol = get<double>(cfg, "solver.residual_tol");
  rc.solver.max_iterations = get<int>(cfg, "solver.max_iterations");
  rc.solver.imag_time_step = get<double>(cfg, "solver.imag_time_step");
  rc.solver.mixing = get<double>(cfg, "solver.mixing");
  rc.solver.validate();

  rc.t_final = get<double>(cfg, "evolve.t_final");
  if (!(rc.t_final >= 0.0)) throw ConfigError("evolve.t_final must be nonnegative");
  rc.evolve.dt = get<double>(cfg, "evolve.dt");
  rc.evolve.snapshot_stride = get<int>(cfg, "evolve.snapshot_stride");
  rc.evolve.validate();

  const double v = get<double>(cfg, "ramp.velocity_hz_per_ms");
  if (!(v > 0.0)) throw ConfigError("ramp.velocity_hz_per_ms must be positive");
  rc.ramp.duration = rc.units.time_from_ms(rc.units.coupling_hz / v);
  rc.ramp.hold = rc.units.time_from_ms(get<double>(cfg, "ramp.hold_ms"));
  rc.ramp.target = rc.kind;
  rc.ramp.validate();

  rc.delta_grid = grid_from(cfg, "scan.delta_over_j");
  rc.u_grid = grid_from(cfg, "scan.u_over_j");
  if (!cfg["scan"]["store"].is_null()) rc.store = get<std::string>(cfg, "scan.store");
  rc.u_values = get<std::vector<double>>(cfg, "u_values");
  if (rc.u_values.empty()) throw ConfigError("u_values must not be empty");
  rc.energy_definition = energy_definition_from_string(get<std::string>(cfg, "energy_definition"));
  rc.gaa_alpha = get<double>(cfg, "gaa.alpha");

  if (!cfg["fit"]["input"].is_null()) rc.fit_input = get<std::string>(cfg, "fit.input");
  rc.bootstrap = get<int>(cfg, "fit.bootstrap");
  if (rc.bootstrap != 0 && rc.bootstrap < 100) throw ConfigError("fit.bootstrap must be 0 or at least 100");
  rc.noise.sigma = get<double>(cfg, "fit.noise_sigma");
  rc.noise.floor = get<double>(cfg, "fit.floor");
  if (rc.noise.sigma < 0.0 || rc.noise.floor < 0.0) throw ConfigError("fit noise and floor must be nonnegative");
  if (command == "fit" && !rc.fit_input) rc.delta_grid = grid_from(cfg, "fit.delta_over_j");

  rc.recoil = rc.units.energy_from_hz(get<double>(cfg, "bragg.recoil_khz") * 1e3);
  rc.seed = get<std::uint64_t>(cfg, "seed");
  rc.workers = get<int>(cfg, "workers");
  if (rc.workers < 1) throw ConfigError("workers must be at least 1");
  rc.out = get<std::string>(cfg, "out");

  cfg["command"] = command;
  rc.echo = std::move(cfg);
  return rc;
}

}  // namespace nlaa::cli
