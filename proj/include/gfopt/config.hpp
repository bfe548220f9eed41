#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gfopt/vec.hpp"

namespace gfopt {

enum class RunMode { run, validated, sweep, concentration };

std::string to_string(RunMode mode);
RunMode parse_run_mode(const std::string& name);

struct ObjectiveSpec {
  std::string name;
  int dimension = 0;
  std::map<std::string, std::string> params;
};

/// Flat key-value experiment configuration with sectioned keys. See
/// parse_config for the key list.
struct ExperimentConfig {
  RunMode mode = RunMode::run;

  ObjectiveSpec objective;

  // accuracy.*
  double delta = 0.1;
  double eps = 0.3;
  std::optional<double> gamma;

  // theory.*
  std::optional<double> value_gap;           // Delta: bound on f(x0) - inf f
  std::optional<double> lipschitz_override;  // L0 override

  // constants.*
  double budget_scale = 1.0;  // c_T
  double sample_scale = 1.0;  // c_S

  // run.*
  long long batch = 1;                 // k
  std::optional<long long> budget;     // fixed T (overrides the c_T derivation)
  std::uint64_t seed = 1;
  std::optional<Vector> start;         // x0; scalar shorthand fills (s, 0, ..., 0)

  // optimizer.*: raw loop parameters. All four plus run.T bypass the
  // derivation entirely; setting only some of them is an error.
  std::optional<double> raw_rho;   // optimizer.rho
  std::optional<double> raw_nu;    // optimizer.nu
  std::optional<double> raw_clip;  // optimizer.D
  std::optional<double> raw_step;  // optimizer.eta

  // cert.*
  long long hull_samples = 2000;
  long long window_samples = 500;

  // trace.*
  std::string trace = "none";  // none | thin | full
  long long trace_stride = 0;  // 0: auto (thin picks ~1000 records)

  // out.*
  std::string out_dir = "out";

  // sweep.*
  std::vector<int> sweep_dims = {4, 16, 64};
  int sweep_trials = 3;
  long long sweep_budget_floor = 2048;      // first rung of the doubling ladder
  long long sweep_budget_cap = 2097152;     // give up above this budget
  double sweep_start_norm = 3.0;            // ||x0|| per trial, random direction

  // conc.*
  long long conc_count = 1000;
  int conc_dim = 1;
  std::vector<double> conc_lambdas = {2.0, 4.0, 8.0};
  long long conc_trials = 10000;

  /// Warnings accumulated while parsing/validating (e.g. accuracy outside the
  /// (0,1) range the guarantees are stated for). Execution continues.
  std::vector<std::string> warnings;
};

/// Parses `key = value` lines ('#' comments, blank lines ignored). Unknown
/// keys are errors. Throws std::invalid_argument with the offending line.
ExperimentConfig parse_config(std::istream& in);

ExperimentConfig load_config(const std::string& path);

}  // namespace gfopt
