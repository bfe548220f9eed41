#pragma once

// Shared test utilities: small independent oracles and objective builders.
// Everything here is deliberately separate from the library implementation
// paths it is used to check.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gfopt/catalog.hpp"
#include "gfopt/objective.hpp"
#include "gfopt/rng.hpp"
#include "gfopt/vec.hpp"

namespace testing {

using gfopt::Vector;

inline std::unique_ptr<gfopt::StochasticObjective> constant_objective(int d,
                                                                      double c) {
  gfopt::AffinePiece piece;
  piece.slope.assign(d, 0.0);
  piece.intercept = c;
  return gfopt::make_max_affine(d, {piece});
}

/// The full catalog spread used by the property suites: every base with a
/// representative noise wrapper.
inline std::vector<std::pair<std::string, std::map<std::string, std::string>>>
catalog_specs() {
  return {
      {"euclidean_norm", {}},
      {"euclidean_norm", {{"noise", "additive_scalar"}, {"half_width", "0.5"}}},
      {"abs_sum", {}},
      {"abs_sum", {{"noise", "additive_linear"}, {"noise_norm", "0.5"}}},
      {"max_affine", {}},
      {"max_affine", {{"noise", "piece_offsets"}, {"half_width", "0.5"}}},
      {"sphere_valley", {}},
      {"sphere_valley", {{"noise", "additive_scalar"}, {"half_width", "1"}}},
  };
}

inline Vector random_point(int d, double radius, gfopt::RandomStream& rng) {
  Vector x(d);
  for (double& v : x) v = rng.uniform(-radius, radius);
  return x;
}

/// Central finite differences on f (evaluated through the neutral component),
/// the independent check for exact-gradient oracles.
inline Vector finite_difference_gradient(const gfopt::StochasticObjective& obj,
                                         const Vector& x, double step) {
  const gfopt::NoiseComponent neutral = obj.neutral_component();
  Vector g(x.size());
  Vector plus = x;
  Vector minus = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    plus[i] = x[i] + step;
    minus[i] = x[i] - step;
    g[i] = (obj.evaluate(plus, neutral) - obj.evaluate(minus, neutral)) /
           (2.0 * step);
    plus[i] = x[i];
    minus[i] = x[i];
  }
  return g;
}

/// Simpson-rule quadrature on [lo, hi]; the oracle behind the hand-derived
/// one-dimensional smoothing values.
inline double simpson(const std::function<double(double)>& f, double lo,
                      double hi, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) {
    sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

/// Brute-force min-norm point over the coefficient simplex. Full enumeration
/// at the requested resolution for up to 3 points; for larger sets the grid
/// is refined around the incumbent (the objective is convex, so refinement
/// reaches the same resolution as full enumeration).
class SimplexGridOracle {
 public:
  explicit SimplexGridOracle(const std::vector<Vector>& points)
      : points_(points), dim_(points.front().size()) {}

  Vector search(double grid_step) const {
    const int n = static_cast<int>(points_.size());
    if (n == 1) return points_[0];
    // Full enumeration at grid_step for small sets; larger sets start from a
    // coarse full grid and refine decimally (the objective is convex, so
    // refinement reaches the same minimizer as full enumeration).
    std::vector<double> incumbent;
    double best = std::numeric_limits<double>::infinity();
    double step;
    if (n <= 3) {
      enumerate(n, static_cast<int>(std::round(1.0 / grid_step)), best, incumbent);
      step = grid_step;
    } else {
      enumerate(n, 10, best, incumbent);
      step = 0.1;
      while (step > grid_step * 1.0000001) {
        step /= 10.0;
        refine_to_stall(incumbent, step, best);
      }
    }
    // Two more decades: rounding the true coefficients to a grid of step s
    // can move the output point by ~sqrt(k * lambda_max) * s, which at s =
    // 1e-3 is comparable to the tolerances this oracle serves; sharpening the
    // oracle keeps its own quantization negligible in comparisons.
    while (step > grid_step / 100.0 * 1.0000001) {
      step /= 10.0;
      refine_to_stall(incumbent, step, best);
    }
    return combine(incumbent);
  }

 private:
  double value(const std::vector<double>& weights) const {
    Vector g(dim_, 0.0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
      gfopt::vec::axpy(g, weights[i], points_[i]);
    }
    return gfopt::vec::dot(g, g);
  }

  Vector combine(const std::vector<double>& weights) const {
    Vector g(dim_, 0.0);
    for (std::size_t i = 0; i < points_.size(); ++i) {
      gfopt::vec::axpy(g, weights[i], points_[i]);
    }
    return g;
  }

  void enumerate(int n, int divisions, double& best,
                 std::vector<double>& best_weights) const {
    std::vector<int> counts(n, 0);
    std::vector<double> weights(n, 0.0);
    enumerate_rec(0, divisions, counts, weights, divisions, best, best_weights);
  }

  void enumerate_rec(int index, int remaining, std::vector<int>& counts,
                     std::vector<double>& weights, int divisions, double& best,
                     std::vector<double>& best_weights) const {
    const int n = static_cast<int>(points_.size());
    if (index == n - 1) {
      counts[index] = remaining;
      for (int i = 0; i < n; ++i) {
        weights[i] = static_cast<double>(counts[i]) / divisions;
      }
      const double v = value(weights);
      if (v < best) {
        best = v;
        best_weights = weights;
      }
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      counts[index] = c;
      enumerate_rec(index + 1, remaining - c, counts, weights, divisions, best,
                    best_weights);
    }
  }

  // Recentered neighborhood passes until no grid move in the window improves;
  // flat basins need the walk, single passes can stall short of the minimum.
  void refine_to_stall(std::vector<double>& incumbent, double step,
                       double& best) const {
    for (int pass = 0; pass < 300; ++pass) {
      const double before = best;
      refine(incumbent, step, best);
      if (best >= before - 1e-18 - 1e-12 * std::abs(before)) break;
    }
  }

  // Neighborhood grid of the incumbent at the given step, projected back to
  // the simplex through the last coordinate.
  void refine(std::vector<double>& incumbent, double step, double& best) const {
    const int n = static_cast<int>(points_.size());
    const int radius = 7;
    std::vector<int> offsets(n - 1, -radius);
    std::vector<double> weights(n, 0.0);
    std::vector<double> best_weights = incumbent;
    for (;;) {
      double head = 0.0;
      bool feasible = true;
      for (int i = 0; i < n - 1 && feasible; ++i) {
        weights[i] = incumbent[i] + offsets[i] * step;
        if (weights[i] < -1e-12) feasible = false;
        if (weights[i] < 0.0) weights[i] = 0.0;
        head += weights[i];
      }
      if (feasible && head <= 1.0 + 1e-12) {
        weights[n - 1] = std::max(0.0, 1.0 - head);
        const double v = value(weights);
        if (v < best) {
          best = v;
          best_weights = weights;
        }
      }
      int carry = 0;
      for (; carry < n - 1; ++carry) {
        if (++offsets[carry] <= radius) break;
        offsets[carry] = -radius;
      }
      if (carry == n - 1) break;
    }
    incumbent = best_weights;
  }

  const std::vector<Vector>& points_;
  std::size_t dim_;
};

}  // namespace testing
