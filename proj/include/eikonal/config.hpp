#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace eikonal {

struct Config {
  int grid_nr = 64;
  int grid_nt = 256;
  double grid_r1 = 0.0;  // 0 selects e^(2 pi)
  int family_n = 2;
  int family_k = 1;
  double ift_amplitude = 1e-2;
  double ift_tol = 1e-9;
  std::vector<double> plaplace_ps{4.0, 8.0, 16.0};
  double plaplace_tol = 1e-10;
  std::string output_dir = "eikonal-out";
  std::uint64_t run_seed = 20240611;

  double r1() const;
};

// Keys accepted in config files and as --key value overrides.
const std::vector<std::string>& config_keys();

// Applies one key = value pair. Unknown keys and malformed values throw ConfigError.
void apply_setting(Config& cfg, const std::string& key, const std::string& value);

// Flat text: one "key = value" per line, '#' starts a comment.
void load_config_file(Config& cfg, const std::string& path);
void parse_config_text(Config& cfg, const std::string& text, const std::string& origin = "config");

// Canonical key -> value rendering, used in reports.
std::map<std::string, std::string> config_entries(const Config& cfg);

}  // namespace eikonal
