#pragma once

#include <chrono>
#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlaa/eigensolve.hpp"
#include "nlaa/model.hpp"

namespace nlaa {

using json = nlohmann::json;

// 12 significant digits, the fixed format of every CSV this library writes.
std::string fmt(double v);
// Round-trip precision (%.17g), used for keys and persisted scan cells.
std::string fmt_exact(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void header(std::initializer_list<std::string> cols);
  void header(const std::vector<std::string>& cols);
  CsvWriter& cell(double v);
  CsvWriter& cell(int v);
  CsvWriter& cell(const std::string& v);
  void end_row();

 private:
  std::ostream& os_;
  bool fresh_ = true;
  void sep();
};

json to_json(const ModelParams& p);
ModelParams model_params_from_json(const json& j);
json to_json(const SolverOptions& o);
json to_json(const LatticeState& s);
json to_json(const EigenSolution& s);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Collects output files of one run and writes manifest.json beside them:
/// config echo, tool and library versions, wall time, and the SHA-256 of each file.
class Manifest {
 public:
  Manifest(std::filesystem::path dir, std::string command, json config);
  // Writes `content` to dir/name and records it.
  std::filesystem::path write_file(const std::string& name, const std::string& content);
  void add_existing(const std::string& name);
  void note(const std::string& key, json value) { extra_[key] = std::move(value); }
  std::filesystem::path finish();

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::string command_;
  json config_;
  json extra_ = json::object();
  std::vector<std::string> files_;
  std::chrono::steady_clock::time_point start_;
};

std::string library_version();

}  // namespace nlaa
