#pragma once

#include "eikonal/config.hpp"
#include "eikonal/core_fields.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace eikonal {

enum ExitCode { kExitPass = 0, kExitUsage = 1, kExitFailure = 2 };

struct CommandOutput {
  SolveReport report;
  std::vector<std::string> artifacts;
  nlohmann::json run_extra = nlohmann::json::object();
};

// Each pipeline fills a report and writes its CSVs under cfg.output_dir.
// Errors propagate as exceptions.
CommandOutput analytic_pipeline(const Config& cfg, std::ostream& log);
CommandOutput ift_pipeline(const Config& cfg, std::ostream& log);
CommandOutput plaplace_pipeline(const Config& cfg, std::ostream& log);
CommandOutput compare_pipeline(const Config& cfg, std::ostream& log);

// Runs a pipeline, writes report.json and maps the outcome to an exit code:
// 0 all checks pass, 1 usage or configuration error, 2 failed check or
// solver failure.
int run_command(const std::string& command, const Config& cfg, std::ostream& log);

int cmd_analytic(const Config& cfg, std::ostream& log);
int cmd_ift(const Config& cfg, std::ostream& log);
int cmd_plaplace(const Config& cfg, std::ostream& log);
int cmd_compare(const Config& cfg, std::ostream& log);

// Exit code for an exception kind name such as "StencilError".
int exit_code_for(const std::string& error_kind);

// Minimum distance between distinct mapped nodes; 0 means two nodes collide.
double min_image_separation(const VectorField& u);

}  // namespace eikonal
