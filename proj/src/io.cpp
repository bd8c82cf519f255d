#include "nlaa/io.hpp"

#include <openssl/evp.h>

#include <Eigen/Core>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "nlaa/errors.hpp"

namespace nlaa {

namespace {

std::string printf_double(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

std::string fmt(double v) { return printf_double("%.12g", v); }
std::string fmt_exact(double v) { return printf_double("%.17g", v); }

void CsvWriter::sep() {
  if (!fresh_) os_ << ',';
  fresh_ = false;
}

void CsvWriter::header(std::initializer_list<std::string> cols) {
  header(std::vector<std::string>(cols));
}

void CsvWriter::header(const std::vector<std::string>& cols) {
  for (const auto& c : cols) cell(c);
  end_row();
}

CsvWriter& CsvWriter::cell(double v) {
  sep();
  os_ << fmt(v);
  return *this;
}

CsvWriter& CsvWriter::cell(int v) {
  sep();
  os_ << v;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  sep();
  if (v.find_first_of(",\"\n") == std::string::npos) {
    os_ << v;
  } else {
    os_ << '"';
    for (char ch : v) os_ << (ch == '"' ? "\"\"" : std::string(1, ch));
    os_ << '"';
  }
  return *this;
}

void CsvWriter::end_row() {
  os_ << '\n';
  fresh_ = true;
}

json to_json(const ModelParams& p) {
  return {{"L", p.L},         {"J", p.J},       {"delta_over_j", p.delta}, {"beta", p.beta},
          {"phi_rad", p.phi}, {"u_over_j", p.U}, {"units", "J=1, hbar=1"}, {"boundary", "open"}};
}

ModelParams model_params_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("model parameters must be a JSON object");
  ModelParams p;
  try {
    p.L = j.value("L", p.L);
    p.J = j.value("J", p.J);
    p.delta = j.value("delta_over_j", p.delta);
    p.beta = j.value("beta", p.beta);
    p.phi = j.value("phi_rad", p.phi);
    p.U = j.value("u_over_j", p.U);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model parameters: ") + e.what());
  }
  p.validate();
  return p;
}

json to_json(const SolverOptions& o) {
  return {{"residual_tol", o.residual_tol},        {"max_iterations", o.max_iterations},
          {"imag_time_step", o.imag_time_step},    {"mixing", o.mixing},
          {"handoff_residual", o.handoff_residual}, {"max_refine_iterations", o.max_refine_iterations}};
}

json to_json(const LatticeState& s) {
  json amps = json::array();
  for (const auto& a : s.amplitudes()) amps.push_back({a.real(), a.imag()});
  return {{"amplitudes_re_im", amps}, {"center", s.center()}};
}

json to_json(const EigenSolution& s) {
  return {{"kind", to_string(s.kind)},
          {"mu", s.mu},
          {"energy", s.energy},
          {"residual", s.residual},
          {"iterations", s.iterations},
          {"converged", s.converged},
          {"participation_ratio", participation_ratio(s.state)},
          {"state", to_json(s.state)}};
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

Manifest::Manifest(std::filesystem::path dir, std::string command, json config)
    : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(config)),
      start_(std::chrono::steady_clock::now()) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

std::filesystem::path Manifest::write_file(const std::string& name, const std::string& content) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  out.close();
  files_.push_back(name);
  return path;
}

void Manifest::add_existing(const std::string& name) { files_.push_back(name); }

std::filesystem::path Manifest::finish() {
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  json files = json::array();
  for (const auto& f : files_)
    files.push_back({{"path", f}, {"sha256", sha256_file(dir_ / f)},
                     {"bytes", std::filesystem::file_size(dir_ / f)}});
  json m = {{"command", command_},
            {"config", config_},
            {"versions",
             {{"nlaa", library_version()},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                            "." + std::to_string(EIGEN_MINOR_VERSION)},
              {"compiler", __VERSION__},
              {"cxx_standard", static_cast<long>(__cplusplus)}}},
            {"wall_time_s", wall},
            {"files", files}};
  if (!extra_.empty()) m["notes"] = extra_;
  const auto path = dir_ / "manifest.json";
  std::ofstream out(path);
  out << m.dump(2) << '\n';
  return path;
}

std::string library_version() { return "0.1.0"; }

}  // namespace nlaa
