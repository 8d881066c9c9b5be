#pragma once

// End-to-end scenario runs: build, approximate, extend, smooth, verify, emit.

#include "bairext/extension_op.hpp"
#include "bairext/scenarios.hpp"
#include "bairext/verify.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bairext {

struct RunConfig {
  std::string scenario = "S0";
  ScenarioParams params;
  double tol = 0.05;
  std::uint64_t seed = 0;  // recorded; every stage is deterministic
  std::string out = "out";
  std::string format = "csv";  // csv | json
};

/// Applies the keys of a JSON object (scenario, grid, norm, mode, tol, steps,
/// seed, out, format, d0, eps) on top of `base`. Throws config on bad input.
RunConfig config_from_json(const std::string& text, RunConfig base = {});
/// Sets one key from its textual value, as the CLI flags do.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

struct RunReport {
  CertReport report;
  bool informational = false;  // excluded from the verdict
};

struct RunOutput {
  BuiltScenario scenario;
  PipelineResult pipeline;
  ExtensionField field;
  std::vector<RunReport> reports;
  std::vector<std::string> warnings;
  bool failed = false;

  std::string manifest;   // manifest.json text
  std::string field_text; // field.csv or field.json text
  std::string stages;     // pipeline.jsonl text
};

RunOutput run_scenario(const RunConfig& cfg);

/// Writes manifest.json, field.csv|field.json and pipeline.jsonl under cfg.out.
void write_outputs(const RunConfig& cfg, const RunOutput& out);

/// 0 when no non-informational report failed, 1 otherwise.
inline int exit_code(const RunOutput& out) { return out.failed ? 1 : 0; }

} // namespace bairext
