#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nlaa/dynamics.hpp"
#include "nlaa/eigensolve.hpp"
#include "nlaa/fit.hpp"
#include "nlaa/gaa.hpp"
#include "nlaa/io.hpp"
#include "nlaa/scan.hpp"
#include "nlaa/units.hpp"

namespace nlaa::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240917;
inline constexpr const char* kOutDirEnv = "NLAA_OUT_DIR";

// Flags given on the command line; each one overrides the config file.
struct Overrides {
  std::optional<int> L;
  std::optional<double> delta_over_j;
  std::optional<double> u_over_j;
  std::optional<std::string> phi;  // number in radians, or "mirror"
  std::optional<std::string> kind;
  std::optional<std::string> preparation;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
};

struct RunConfig {
  std::string command;
  json echo;  // fully merged configuration, as written to the manifest

  ModelParams model;
  bool si_input = false;
  UnitSystem units;
  StateKind kind = StateKind::ground;
  Preparation preparation = Preparation::exact;
  SolverOptions solver;
  EvolveOptions evolve;
  double t_final = 4.0;
  RampProtocol ramp;
  std::vector<double> delta_grid;
  std::vector<double> u_grid;
  std::vector<double> u_values;
  std::optional<std::filesystem::path> store;
  EnergyDefinition energy_definition = EnergyDefinition::mu;
  double gaa_alpha = 0.3;
  std::optional<std::filesystem::path> fit_input;
  int bootstrap = 200;
  MeasurementNoise noise;
  double recoil = 0.0;  // E_R in units of J
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  std::filesystem::path out;
};

const std::vector<std::string>& subcommands();

// Defaults for `command`, merged with the config file, then the overrides.
// Throws ConfigError with a message naming the offending key.
RunConfig build_config(const std::string& command, const std::optional<std::filesystem::path>& config_file,
                       const Overrides& ov);
RunConfig build_config(const std::string& command, json file, const Overrides& ov);

}  // namespace nlaa::cli
