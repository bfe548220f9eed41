#pragma once

#include <filesystem>

#include "gfopt/config.hpp"
#include "gfopt/report.hpp"

namespace gfopt {

struct ExperimentOutput {
  Report summary;
  std::filesystem::path summary_path;
  std::filesystem::path echo_path;
  std::filesystem::path certificates_path;  // empty for modes without certificates
  std::filesystem::path trace_path;         // empty when no trace was written
};

/// Executes the configured mode end to end: derives hyper-parameters, runs
/// the selected pipeline, computes certificates on the outputs and writes
/// summary.csv / config_echo.json (plus trace.jsonl for run/validated modes
/// with tracing enabled) under config.out_dir.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// The sweep pipeline on its own (also reachable via mode = sweep): for every
/// dimension and trial, the smallest budget on a doubling ladder whose
/// certificate meets eps, for both the main loop and the SGD baseline,
/// plus per-dimension medians and fitted log-log slopes.
Report sweep_dimension(const ExperimentConfig& config,
                       const std::vector<int>& dims, int trials);

}  // namespace gfopt
