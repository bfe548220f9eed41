#include "gfopt/highprob.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "gfopt/smoothing.hpp"

namespace gfopt {
namespace {

const double kSecondMomentConstant = 16.0 * std::sqrt(2.0 * std::numbers::pi);

}  // namespace

ValidationParams derive_validation_params(double gamma, int dimension,
                                          double lipschitz,
                                          long long window_size, double eps,
                                          double sample_scale) {
  if (!(gamma > 0.0) || !(gamma < 1.0)) {
    throw std::invalid_argument("derive_validation_params: gamma must lie in (0, 1)");
  }
  if (dimension < 1 || window_size < 1) {
    throw std::invalid_argument(
        "derive_validation_params: dimension and window size must be >= 1");
  }
  if (!(lipschitz > 0.0) || !(eps > 0.0) || !(sample_scale > 0.0)) {
    throw std::invalid_argument(
        "derive_validation_params: lipschitz, eps and sample scale must be > 0");
  }

  ValidationParams params;
  params.gamma = gamma;
  params.window_size = window_size;
  params.rounds = static_cast<int>(
      std::max<long long>(1, num::ceil_snapped(std::log2(2.0 / gamma))));
  params.tail_factor = num::ceil_snapped(2.0 * params.rounds / gamma);

  // Smallest S with tail_factor * 16 sqrt(2 pi) d L0^2 / (M S) <= eps^2 / 4.
  const double required = 4.0 * kSecondMomentConstant * params.tail_factor *
                          dimension * lipschitz * lipschitz /
                          (static_cast<double>(window_size) * eps * eps);
  if (!(required < 4.0e18)) {
    throw std::invalid_argument(
        "derive_validation_params: validation sample count overflows");
  }
  params.samples =
      std::max<long long>(1, num::ceil_snapped(sample_scale * required));
  params.meets_theory =
      static_cast<double>(params.samples) >= required * (1.0 - 1e-12);
  return params;
}

ValidatedResult run_validated(const StochasticObjective& obj, const Vector& x0,
                              const OptimizerConfig& config,
                              const ValidationParams& params, RandomStream& rng,
                              const RunOptions& options) {
  config.validate();
  if (params.rounds < 1 || params.samples < 1) {
    throw std::invalid_argument("run_validated: validation params not derived");
  }
  if (params.window_size != config.window_size()) {
    std::ostringstream msg;
    msg << "run_validated: validation params were derived for window size "
        << params.window_size << " but the optimizer config has "
        << config.window_size();
    throw std::invalid_argument(msg.str());
  }

  const long long window_size = config.window_size();
  ValidatedResult result;
  result.rounds.reserve(params.rounds);

  for (int r = 1; r <= params.rounds; ++r) {
    RandomStream run_stream = rng.substream(2 * static_cast<std::uint64_t>(r));
    RandomStream validation_stream =
        rng.substream(2 * static_cast<std::uint64_t>(r) + 1);

    RoundOutcome outcome;
    outcome.run = run(obj, x0, config, run_stream, options);

    // Fresh components and directions, independent of the optimization pass:
    // S sweeps over the window, averaged twice.
    Vector sum(obj.dimension(), 0.0);
    Vector inner(obj.dimension(), 0.0);
    for (long long s = 0; s < params.samples; ++s) {
      std::fill(inner.begin(), inner.end(), 0.0);
      for (const Vector& z : outcome.run.window_points) {
        const NoiseComponent xi = obj.sample_component(validation_stream);
        const Vector w = sample_unit_sphere(obj.dimension(), validation_stream);
        const EstimatorSample sample =
            grad_estimate(obj, z, config.rho, xi, w);
        vec::axpy(inner, 1.0, sample.g);
      }
      vec::axpy(sum, 1.0 / static_cast<double>(window_size), inner);
    }
    outcome.estimate = vec::scaled(sum, 1.0 / static_cast<double>(params.samples));
    outcome.estimate_norm = vec::norm(outcome.estimate);
    result.rounds.push_back(std::move(outcome));
  }

  int best = 0;
  for (int r = 1; r < static_cast<int>(result.rounds.size()); ++r) {
    if (result.rounds[r].estimate_norm < result.rounds[best].estimate_norm) {
      best = r;
    }
  }
  result.chosen_round = best + 1;
  result.x_out = result.rounds[best].run.x_out;
  result.total_evaluations = 0;
  for (const RoundOutcome& round : result.rounds) {
    result.total_evaluations += round.run.evaluations_used;
  }
  result.total_evaluations +=
      2LL * params.rounds * window_size * params.samples;
  return result;
}

}  // namespace gfopt
