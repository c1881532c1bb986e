#include "eikonal/config.hpp"

#include "eikonal/core_fields.hpp"
#include "eikonal/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace eikonal {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

int to_small_int(const std::string& key, const std::string& v) {
  const long long x = to_int(key, v);
  if (x < -1000000 || x > 1000000) throw ConfigError(key + ": value out of range");
  return static_cast<int>(x);
}

std::string render(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

}  // namespace

double Config::r1() const { return grid_r1 > 0.0 ? grid_r1 : std::exp(kTwoPi); }

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "grid.nr",      "grid.nt", "grid.r1",     "family.n",     "family.k",   "ift.amplitude",
      "ift.tol",      "plaplace.ps", "plaplace.tol", "output.dir", "run.seed"};
  return keys;
}

void apply_setting(Config& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string v = trim(raw_value);
  if (v.empty()) throw ConfigError(key + ": empty value");
  if (key == "grid.nr") {
    cfg.grid_nr = to_small_int(key, v);
  } else if (key == "grid.nt") {
    cfg.grid_nt = to_small_int(key, v);
  } else if (key == "grid.r1") {
    cfg.grid_r1 = to_double(key, v);
    if (cfg.grid_r1 <= 1.0) throw ConfigError("grid.r1 must exceed the inner radius 1");
  } else if (key == "family.n") {
    cfg.family_n = to_small_int(key, v);
    if (cfg.family_n < 1) throw ConfigError("family.n must be positive");
  } else if (key == "family.k") {
    cfg.family_k = to_small_int(key, v);
  } else if (key == "ift.amplitude") {
    cfg.ift_amplitude = to_double(key, v);
    if (cfg.ift_amplitude < 0.0) throw ConfigError("ift.amplitude must be non-negative");
  } else if (key == "ift.tol") {
    cfg.ift_tol = to_double(key, v);
    if (cfg.ift_tol <= 0.0) throw ConfigError("ift.tol must be positive");
  } else if (key == "plaplace.ps") {
    std::vector<double> ps;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) ps.push_back(to_double(key, trim(item)));
    if (ps.empty()) throw ConfigError("plaplace.ps is empty");
    cfg.plaplace_ps = ps;
  } else if (key == "plaplace.tol") {
    cfg.plaplace_tol = to_double(key, v);
    if (cfg.plaplace_tol <= 0.0) throw ConfigError("plaplace.tol must be positive");
  } else if (key == "output.dir") {
    cfg.output_dir = v;
  } else if (key == "run.seed") {
    const long long s = to_int(key, v);
    if (s < 0) throw ConfigError("run.seed must be non-negative");
    cfg.run_seed = static_cast<std::uint64_t>(s);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void parse_config_text(Config& cfg, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void load_config_file(Config& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  parse_config_text(cfg, buf.str(), path);
}

std::map<std::string, std::string> config_entries(const Config& cfg) {
  std::string ps;
  for (std::size_t i = 0; i < cfg.plaplace_ps.size(); ++i) {
    if (i) ps += ",";
    ps += render(cfg.plaplace_ps[i]);
  }
  return {{"grid.nr", std::to_string(cfg.grid_nr)},
          {"grid.nt", std::to_string(cfg.grid_nt)},
          {"grid.r1", render(cfg.r1())},
          {"family.n", std::to_string(cfg.family_n)},
          {"family.k", std::to_string(cfg.family_k)},
          {"ift.amplitude", render(cfg.ift_amplitude)},
          {"ift.tol", render(cfg.ift_tol)},
          {"plaplace.ps", ps},
          {"plaplace.tol", render(cfg.plaplace_tol)},
          {"output.dir", cfg.output_dir},
          {"run.seed", std::to_string(cfg.run_seed)}};
}

}  // namespace eikonal
