#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gfopt/objective.hpp"

namespace gfopt {

/// Noise families attachable to the builtin objectives. All are mean-zero and
/// have closed-form per-component Lipschitz constants, so the second-moment
/// assumption is verifiable rather than assumed.
enum class NoiseFamily {
  none,             // degenerate: exact evaluations
  additive_scalar,  // F(x;xi) = f(x) + xi,      xi ~ Unif[-h, h]
  additive_linear,  // F(x;xi) = f(x) + <xi, x>, xi ~ Unif(ball of radius b)
  piece_offsets,    // max-affine only: per-piece intercept offsets Unif[-h, h]
};

struct AffinePiece {
  Vector slope;
  double intercept = 0.0;
};

/// Builtin objective catalog addressable by (name, d, params).
///
/// Names: euclidean_norm, abs_sum, max_affine, sphere_valley.
/// Params (all optional):
///   noise      = none | additive_scalar | additive_linear | piece_offsets
///   half_width = h for additive_scalar / piece_offsets (default 0.5)
///   noise_norm = b for additive_linear (default 0.5)
///   a<i>, b<i> = max_affine pieces: slope (comma/space-separated, length d)
///                and intercept; defaults to the +-e_i cross (the max-norm).
std::unique_ptr<StochasticObjective> make_builtin(
    const std::string& name, int dimension,
    const std::map<std::string, std::string>& params = {});

/// Max of affine pieces with an explicit piece list.
std::unique_ptr<StochasticObjective> make_max_affine(
    int dimension, std::vector<AffinePiece> pieces,
    NoiseFamily noise = NoiseFamily::none, double noise_scale = 0.0);

/// Single-piece convenience: f(x) = <slope, x>.
std::unique_ptr<StochasticObjective> make_linear(Vector slope);

}  // namespace gfopt
