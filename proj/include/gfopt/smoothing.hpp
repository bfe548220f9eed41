#pragma once

#include <span>

#include "gfopt/objective.hpp"
#include "gfopt/rng.hpp"
#include "gfopt/vec.hpp"

namespace gfopt {

/// Uniform draw from the unit sphere S^{d-1} (normalized Gaussians).
Vector sample_unit_sphere(int dimension, RandomStream& rng);

/// Uniform draw from the closed unit ball (sphere draw scaled by U^{1/d}).
Vector sample_unit_ball(int dimension, RandomStream& rng);

struct EstimatorSample {
  Vector g;
  Vector direction;
  NoiseComponent component;
};

/// Two-point gradient estimate of the uniform smoothing f_rho at x:
///   g = d/(2 rho) * (F(x + rho w; xi) - F(x - rho w; xi)) * w,
/// both evaluations under the same component (common random numbers).
/// Exactly two objective evaluations.
EstimatorSample grad_estimate(const StochasticObjective& obj,
                              std::span<const double> x, double rho,
                              const NoiseComponent& xi,
                              std::span<const double> direction);

/// Mean of `batch` independent estimator samples (fresh component and
/// direction per sample, 2*batch evaluations). Accumulation order is fixed,
/// so the result is deterministic given the stream.
Vector batched_grad_estimate(const StochasticObjective& obj,
                             std::span<const double> x, double rho,
                             long long batch, RandomStream& rng);

struct MonteCarloValue {
  double value = 0.0;
  double std_error = 0.0;
  long long samples = 0;
};

/// Monte-Carlo estimate of f_rho(x): average of F(x + rho z; xi) over uniform
/// ball draws z with a fresh component per sample.
MonteCarloValue smoothed_value_mc(const StochasticObjective& obj,
                                  std::span<const double> x, double rho,
                                  long long samples, RandomStream& rng);

struct MonteCarloVector {
  Vector mean;
  Vector std_error;  // per-coordinate standard error of the mean
  long long samples = 0;

  /// Conservative combined standard error (norm of the per-coordinate SEs).
  double combined_std_error() const { return vec::norm(std_error); }
};

/// Monte-Carlo estimate of grad f_rho(x): mean of independent estimator
/// samples with per-coordinate standard errors. Serves as the test-time
/// oracle for the smoothed gradient.
MonteCarloVector smoothed_grad_mc(const StochasticObjective& obj,
                                  std::span<const double> x, double rho,
                                  long long samples, RandomStream& rng);

}  // namespace gfopt
