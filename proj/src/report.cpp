#include "eikonal/report.hpp"

#include "eikonal/errors.hpp"

#include <cmath>
#include <fstream>

namespace eikonal {
namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

nlohmann::json check_to_json(const CheckResult& c) {
  nlohmann::json j;
  j["value"] = number(c.value);
  j["tolerance"] = number(c.tolerance);
  if (!std::isnan(c.tolerance_hi)) j["tolerance_hi"] = number(c.tolerance_hi);
  j["relation"] = c.relation;
  j["pass"] = c.pass;
  return j;
}

nlohmann::json build_report(const RunInfo& run, const Config& cfg, const SolveReport& rep) {
  nlohmann::json out;

  nlohmann::json r;
  r["command"] = run.command;
  r["kind"] = rep.kind;
  r["status"] = run.status;
  r["exit_code"] = run.exit_code;
  r["seed"] = cfg.run_seed;
  r["iterations"] = rep.iterations;
  if (!run.error_kind.empty()) {
    r["error"] = {{"kind", run.error_kind}, {"message", run.error_message}};
  }
  out["run"] = r;

  nlohmann::json c = nlohmann::json::object();
  for (const auto& [k, v] : config_entries(cfg)) c[k] = v;
  out["config"] = c;

  nlohmann::json checks = nlohmann::json::object();
  for (const auto& [name, chk] : rep.checks) checks[name] = check_to_json(chk);
  out["checks"] = checks;

  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [name, v] : rep.metrics) metrics[name] = number(v);
  for (const auto& [name, series] : rep.series) {
    nlohmann::json arr = nlohmann::json::array();
    for (double v : series) arr.push_back(number(v));
    metrics[name] = arr;
  }
  out["metrics"] = metrics;

  out["artifacts"] = run.artifacts;
  return out;
}

void write_report(const std::string& path, const nlohmann::json& report) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write report to '" + path + "'");
  f << report.dump(2) << "\n";
}

}  // namespace eikonal
