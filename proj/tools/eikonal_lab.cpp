// eikonal-lab <analytic|ift|plaplace|compare> [--config FILE] [--key value ...]

#include "eikonal/commands.hpp"
#include "eikonal/config.hpp"
#include "eikonal/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Eikonal infinity-harmonic map laboratory"};
  std::string command;
  std::string config_file;
  app.add_option("command", command, "analytic, ift, plaplace or compare")
      ->required()
      ->check(CLI::IsMember({"analytic", "ift", "plaplace", "compare"}));
  app.add_option("--config", config_file, "flat key = value file");

  std::map<std::string, std::string> overrides;
  for (const std::string& key : eikonal::config_keys()) {
    app.add_option("--" + key, overrides[key], "override " + key);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? eikonal::kExitPass : eikonal::kExitUsage;
  }

  eikonal::Config cfg;
  try {
    if (!config_file.empty()) eikonal::load_config_file(cfg, config_file);
    for (const std::string& key : eikonal::config_keys()) {
      if (app.count("--" + key) > 0) eikonal::apply_setting(cfg, key, overrides[key]);
    }
  } catch (const eikonal::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return eikonal::kExitUsage;
  }

  return eikonal::run_command(command, cfg, std::cerr);
}
