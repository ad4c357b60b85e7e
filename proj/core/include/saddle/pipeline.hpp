#pragma once

#include <string>
#include <vector>

#include "saddle/config.hpp"

namespace saddle {

struct PipelineResult {
  int exit_code = 0;  // 0 ok, 2 config, 3 solver, 4 verification
  std::vector<std::string> written;
  std::string message;
};

/// Runs the enabled stages (profile, solve, verify, stability) in order,
/// writing CSV fields, JSON reports and a manifest into cfg.output_dir.
/// Reports are byte-deterministic for a fixed config and seed; the manifest
/// carries wall-clock times and is the only run-specific file.
PipelineResult run_pipeline(const ExperimentConfig& cfg);

}  // namespace saddle
