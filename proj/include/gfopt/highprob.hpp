#pragma once

#include <vector>

#include "gfopt/optimizer.hpp"

namespace gfopt {

/// Restart/validation schedule for the high-probability variant.
struct ValidationParams {
  double gamma = 0.0;
  int rounds = 0;              // R
  long long samples = 0;       // S: validation passes per round
  long long tail_factor = 0;   // lambda = ceil(2R / gamma)
  long long window_size = 0;   // M the schedule was derived for
  bool meets_theory = true;    // false when samples were scaled below theory
};

/// R = ceil(log2(2/gamma)), lambda = ceil(2R/gamma), and S large enough that
/// lambda * 16 sqrt(2 pi) d L0^2 / (M S) <= eps^2 / 4, i.e.
/// S = ceil(64 sqrt(2 pi) lambda d L0^2 / (M eps^2)). `sample_scale` < 1
/// shrinks S below the theory value for desk-scale runs (flagged in the
/// result).
ValidationParams derive_validation_params(double gamma, int dimension,
                                          double lipschitz,
                                          long long window_size, double eps,
                                          double sample_scale = 1.0);

struct RoundOutcome {
  RunResult run;
  Vector estimate;        // validation estimate of the window-average gradient
  double estimate_norm = 0.0;
};

struct ValidatedResult {
  Vector x_out;
  int chosen_round = 0;   // 1-based; argmin of estimate norms, lowest index on ties
  std::vector<RoundOutcome> rounds;
  long long total_evaluations = 0;
};

/// R independent restarts of the main loop from the same x0 (independent
/// substreams), each followed by a validation pass that re-estimates the
/// window-average smoothed gradient with S x M fresh estimator calls at the
/// round's window points. Returns the round with the smallest estimated norm.
ValidatedResult run_validated(const StochasticObjective& obj, const Vector& x0,
                              const OptimizerConfig& config,
                              const ValidationParams& params, RandomStream& rng,
                              const RunOptions& options = {});

}  // namespace gfopt
