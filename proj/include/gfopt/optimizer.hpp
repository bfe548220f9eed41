#pragma once

#include <vector>

#include "gfopt/objective.hpp"
#include "gfopt/rng.hpp"
#include "gfopt/vec.hpp"

namespace gfopt {

/// Hyper-parameters of the clipped zero-order loop. `clip` and `step` are the
/// displacement cap and step size; `budget` is the iteration count; `batch`
/// is the number of estimator samples averaged per iteration.
struct OptimizerConfig {
  double rho = 0.0;
  double nu = 0.0;
  double clip = 0.0;
  double step = 0.0;
  long long budget = 0;
  long long batch = 1;

  /// M: iterates averaged per window.
  long long window_size() const { return num::floor_snapped(nu / clip); }
  /// K: number of complete windows.
  long long window_count() const { return budget / window_size(); }

  /// Throws std::invalid_argument naming the violated floor; never clamps.
  void validate() const;
};

/// Derives the loop hyper-parameters from the problem description:
///   rho = min(delta/2, value_gap / lipschitz),  nu = delta - rho  (summing
///   back to delta exactly), budget = ceil(budget_scale * d * L0^2 *
///   (value_gap + rho L0) / (nu eps^3)), and the clip/step formulas in terms
///   of the resulting budget.
OptimizerConfig derive_hyperparams(double value_gap, double lipschitz,
                                   double delta, double eps, int dimension,
                                   double budget_scale = 1.0,
                                   long long batch = 1);

/// Same derivation with the budget fixed by the caller instead of derived
/// from eps (equivalent to choosing budget_scale so the budget comes out as
/// given).
OptimizerConfig derive_hyperparams_for_budget(double value_gap,
                                              double lipschitz, double delta,
                                              int dimension, long long budget,
                                              long long batch = 1);

/// v if ||v|| <= radius, else v scaled onto the radius sphere. The zero
/// vector maps to itself; the output norm never exceeds radius.
Vector clip_to_ball(Vector v, double radius);

struct IterationRecord {
  long long t = 0;
  double displacement_norm = 0.0;  // ||Delta_t||
  double grad_norm = 0.0;          // ||g_t||
  Vector z;                        // empty unless z-logging is enabled
};

struct TraceOptions {
  long long stride = 0;  // 0 disables trajectory records
  bool log_z = false;
};

struct RunOptions {
  TraceOptions trace;
  // Above this many retained doubles the full z-log is not stored; the chosen
  // window is re-derived by a deterministic replay of the loop instead.
  long long retain_limit = 16'000'000;
};

struct RunResult {
  Vector x_out;
  std::vector<Vector> window_points;  // the chosen window's z-points, in order
  long long chosen_window = 0;        // 1-based index in [1, K]
  std::vector<IterationRecord> trajectory;
  long long evaluations_used = 0;     // oracle queries: 2 * batch * budget
};

/// The clipped incremental loop driven by the batched two-point estimator:
/// Delta_1 = 0; per iteration draw s ~ Unif[0,1], probe z = x + s*Delta,
/// estimate g there, move x by Delta and update Delta = clip(Delta - step*g).
/// Afterwards the probe points are averaged over consecutive windows of size
/// M and one window is chosen uniformly at random (drawn last from the run's
/// own stream); its mean is the output. Window containment and the clip
/// invariant are asserted on every run.
RunResult run(const StochasticObjective& obj, const Vector& x0,
              const OptimizerConfig& config, RandomStream& rng,
              const RunOptions& options = {});

/// Plain SGD on the smoothed objective (comparison baseline): repeated
/// x -= step * g with the batched estimator at smoothing radius `rho`, and a
/// uniformly-random pre-update iterate returned (index drawn first).
Vector baseline_sgd_smoothed(const StochasticObjective& obj, const Vector& x0,
                             double rho, double step, long long budget,
                             long long batch, RandomStream& rng);

}  // namespace gfopt
