#pragma once

#include <vector>

#include "gfopt/rng.hpp"

namespace gfopt {

struct ConcentrationRow {
  double lambda = 0.0;
  double exceedance = 0.0;  // empirical Pr[||sum||^2 >= lambda * N]
  double bound = 0.0;       // 1 / lambda
};

struct ConcentrationResult {
  std::vector<ConcentrationRow> rows;
  double mean_square_ratio = 0.0;  // mean of ||sum||^2 / N over trials
  double mean_square_se = 0.0;
  long long count = 0;   // N: vectors per sum
  int dimension = 0;
  long long trials = 0;
};

/// Draws `trials` independent sums of `count` unit-norm zero-mean vectors
/// (Rademacher coordinates scaled to norm 1) and reports, per lambda, the
/// frequency of ||sum||^2 >= lambda * count next to the Markov bound
/// 1/lambda.
ConcentrationResult concentration_check(long long count, int dimension,
                                        const std::vector<double>& lambdas,
                                        long long trials, RandomStream& rng);

}  // namespace gfopt
