#pragma once

#include "eikonal/config.hpp"
#include "eikonal/core_fields.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace eikonal {

struct RunInfo {
  std::string command;
  std::string status;  // "pass", "fail" or "error"
  int exit_code = 0;
  std::string error_kind;
  std::string error_message;
  std::vector<std::string> artifacts;  // file names relative to output.dir
};

// Top-level keys: run, config, checks, metrics, artifacts. Wall time is left
// out so that reruns of one config produce identical files.
nlohmann::json build_report(const RunInfo& run, const Config& cfg, const SolveReport& rep);

nlohmann::json check_to_json(const CheckResult& c);

void write_report(const std::string& path, const nlohmann::json& report);

}  // namespace eikonal
