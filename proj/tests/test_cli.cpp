#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlaa/errors.hpp"
#include "nlaa/io.hpp"
#include "run_config.hpp"

using namespace nlaa;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("nlaa_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + NLAA_CLI_PATH + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST(Config, DefaultsPerCommand) {
  const auto solve = cli::build_config("solve", json::object(), {});
  EXPECT_EQ(solve.model.L, 21);
  EXPECT_EQ(solve.model.phi, 0.0);
  EXPECT_EQ(solve.seed, cli::kDefaultSeed);
  const auto scan = cli::build_config("scan", json::object(), {});
  EXPECT_EQ(scan.model.phi, mirror_odd_phase(21));
  EXPECT_EQ(scan.delta_grid.size(), 81u);
  EXPECT_EQ(scan.u_grid.size(), 21u);
  EXPECT_EQ(cli::build_config("gaa-me", json::object(), {}).model.L, 987);
  EXPECT_EQ(cli::build_config("fit", json::object(), {}).preparation, Preparation::ramped);
}

TEST(Config, OverridesBeatFile) {
  json file = {{"model", {{"L", 34}, {"delta_over_j", 1.5}}}, {"workers", 3}};
  cli::Overrides ov;
  ov.L = 55;
  ov.phi = "0.25";
  ov.kind = "es";
  const auto rc = cli::build_config("solve", file, ov);
  EXPECT_EQ(rc.model.L, 55);
  EXPECT_EQ(rc.model.delta, 1.5);
  EXPECT_EQ(rc.model.phi, 0.25);
  EXPECT_EQ(rc.kind, StateKind::highest_excited);
  EXPECT_EQ(rc.workers, 3);
  EXPECT_EQ(rc.echo["model"]["L"], 55);
}

TEST(Config, SiInput) {
  json file = {{"model_si", {{"delta_hz", 550.0}, {"scattering_length_bohr", 100.0}}}};
  const auto rc = cli::build_config("solve", file, {});
  EXPECT_TRUE(rc.si_input);
  EXPECT_DOUBLE_EQ(rc.model.delta, 2.0);
  EXPECT_NEAR(rc.model.U, 0.368, 0.005);
  cli::Overrides ov;
  ov.u_over_j = 0.1;
  EXPECT_THROW(cli::build_config("solve", file, ov), ConfigError);
}

TEST(Config, RampFromVelocity) {
  json file = {{"ramp", {{"velocity_hz_per_ms", 137.5}}}};
  const auto rc = cli::build_config("ramp", file, {});
  EXPECT_NEAR(rc.ramp.duration, 2.0 * 2.0 * std::numbers::pi * 0.275, 1e-12);
}

TEST(Config, Rejections) {
  EXPECT_THROW(cli::build_config("solve", json{{"modle", json::object()}}, {}), ConfigError);
  EXPECT_THROW(cli::build_config("solve", json{{"model", {{"U", 1.0}}}}, {}), ConfigError);
  EXPECT_THROW(cli::build_config("solve", json{{"model", json::object()}, {"model_si", json::object()}}, {}),
               ConfigError);
  EXPECT_THROW(cli::build_config("solve", json{{"model", {{"L", "many"}}}}, {}), ConfigError);
  EXPECT_THROW(cli::build_config("solve", json{{"model", {{"phi", "half"}}}}, {}), ConfigError);
  EXPECT_THROW(cli::build_config("solve", json{{"command", "scan"}}, {}), ConfigError);
  EXPECT_THROW(cli::build_config("dance", json::object(), {}), ConfigError);
  EXPECT_THROW(cli::build_config("scan", json{{"scan", {{"delta_over_j", {0.0, 1.0}}}}}, {}), ConfigError);
  EXPECT_THROW(cli::build_config("fit", json{{"fit", {{"bootstrap", 20}}}}, {}), ConfigError);
  cli::Overrides ov;
  ov.workers = 0;
  EXPECT_THROW(cli::build_config("solve", json::object(), ov), ConfigError);
}

TEST(Config, MissingFile) {
  EXPECT_THROW(cli::build_config("solve", std::optional<fs::path>("/nonexistent/cfg.json"), cli::Overrides{}), ConfigError);
}

TEST(Binary, SolveWithoutHoppingPicksLowestSite) {
  const auto dir = scratch("solve");
  const auto cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"model": {"J": 0.0, "delta_over_j": 1.3, "phi": 0.4}})";
  ASSERT_EQ(run("solve --config " + cfg.string() + " --out " + (dir / "o").string()), 0);
  ModelParams p;
  p.delta = 1.3;
  p.phi = 0.4;
  const auto eps = onsite_energies(p);
  const auto jmin = std::min_element(eps.begin(), eps.end()) - eps.begin();
  const auto sol = json::parse(slurp(dir / "o" / "solution.json"));
  const auto amps = sol["state"]["amplitudes_re_im"];
  ASSERT_EQ(amps.size(), 21u);
  const double re = amps[static_cast<std::size_t>(jmin)][0], im = amps[static_cast<std::size_t>(jmin)][1];
  EXPECT_NEAR(re * re + im * im, 1.0, 1e-12);
}

TEST(Binary, ScanFindsNoninteractingTransition) {
  const auto dir = scratch("scan");
  ASSERT_EQ(run("scan --workers 4 --out " + dir.string()), 0);
  std::istringstream in(slurp(dir / "transitions.csv"));
  std::string line;
  bool seen = false;
  while (std::getline(in, line)) {
    if (line.rfind("gs,21,0,found,", 0) != 0) continue;
    const double dc = std::stod(line.substr(std::string("gs,21,0,found,").size()));
    EXPECT_NEAR(dc, 2.0, 0.05);
    seen = true;
  }
  EXPECT_TRUE(seen);
}

TEST(Binary, BraggRecoilRow) {
  const auto dir = scratch("bragg");
  ASSERT_EQ(run("bragg-schedule --out " + dir.string()), 0);
  const auto csv = slurp(dir / "bragg_schedule.csv");
  EXPECT_NE(csv.find("\n0,21.2,"), std::string::npos) << csv;
  EXPECT_NE(csv.find("\n1,63.6,"), std::string::npos);
}

TEST(Binary, ManifestHashesMatchFiles) {
  const auto dir = scratch("manifest");
  ASSERT_EQ(run("evolve --delta-over-j 1 --u-over-j 0.5 --out " + dir.string()), 0);
  const auto man = json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(man["command"], "evolve");
  EXPECT_EQ(man["config"]["model"]["u_over_j"], 0.5);
  EXPECT_TRUE(man.contains("wall_time_s"));
  EXPECT_TRUE(man["versions"].contains("eigen"));
  ASSERT_FALSE(man["files"].empty());
  for (const auto& f : man["files"]) {
    const auto path = dir / f["path"].get<std::string>();
    EXPECT_EQ(f["sha256"], sha256_file(path));
    EXPECT_EQ(f["bytes"].get<std::uintmax_t>(), fs::file_size(path));
  }
}

TEST(Binary, RerunsAreByteIdentical) {
  const auto a = scratch("rerun_a"), b = scratch("rerun_b");
  const std::string args = "fit --seed 5 --workers 2 --config ";
  const auto cfg = a / "cfg.json";
  std::ofstream(cfg) << R"({"fit": {"bootstrap": 100, "delta_over_j": [0.2, 3.5, 0.1]}})";
  ASSERT_EQ(run(args + cfg.string() + " --out " + (a / "o").string()), 0);
  ASSERT_EQ(run(args + cfg.string() + " --out " + (b / "o").string()), 0);
  for (const char* f : {"fit_data.csv", "fit_curve.csv", "fit_result.json"})
    EXPECT_EQ(slurp(a / "o" / f), slurp(b / "o" / f)) << f;
}

TEST(Binary, EnvironmentSetsOutputDirectory) {
  const auto dir = scratch("env");
  ASSERT_EQ(run("bragg-schedule", std::string(cli::kOutDirEnv) + "=" + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(Binary, CsvUsesTwelveSignificantDigits) {
  const auto dir = scratch("digits");
  ASSERT_EQ(run("gaa-me --L 89 --out " + dir.string()), 0);
  std::istringstream in(slurp(dir / "gaa_levels.csv"));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  const std::string first = line.substr(line.find(',') + 1, line.find(',', line.find(',') + 1) - line.find(',') - 1);
  std::size_t digits = 0;
  for (char c : first.substr(0, first.find_first_of("eE"))) digits += std::isdigit(static_cast<unsigned char>(c)) != 0;
  EXPECT_LE(digits, 13u) << first;  // a leading "0." adds one
  EXPECT_GE(digits, 11u) << first;
}

TEST(Binary, ExitCodes) {
  const auto dir = scratch("codes");
  EXPECT_EQ(run("solve --kind middle --out " + dir.string()), 2);
  EXPECT_EQ(run("solve --L 1 --out " + dir.string()), 2);
  EXPECT_EQ(run("nonsense"), 2);
  const auto bad = dir / "bad.json";
  std::ofstream(bad) << "{ not json";
  EXPECT_EQ(run("solve --config " + bad.string() + " --out " + dir.string()), 2);
  // Five points cannot fix four parameters.
  const auto few = dir / "few.csv";
  std::ofstream(few) << "0.5,0.4\n1,0.3\n1.5,0.2\n2,0.05\n2.5,0.05\n";
  const auto cfg = dir / "fit.json";
  std::ofstream(cfg) << R"({"fit": {"input": ")" + few.string() + R"("}})";
  EXPECT_EQ(run("fit --config " + cfg.string() + " --out " + dir.string()), 4);
  // Strong interaction blows up the fixed-step integrator; the norm audit aborts.
  EXPECT_EQ(run("evolve --u-over-j 1e6 --out " + dir.string()), 3);
}
