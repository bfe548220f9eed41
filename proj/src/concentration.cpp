#include "gfopt/concentration.hpp"

#include <cmath>
#include <stdexcept>

#include "gfopt/vec.hpp"

namespace gfopt {

ConcentrationResult concentration_check(long long count, int dimension,
                                        const std::vector<double>& lambdas,
                                        long long trials, RandomStream& rng) {
  if (count < 1 || dimension < 1 || trials < 1) {
    throw std::invalid_argument(
        "concentration_check: count, dimension and trials must be >= 1");
  }
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) {
      throw std::invalid_argument("concentration_check: lambdas must be > 0");
    }
  }

  // Each vector has Rademacher coordinates scaled to unit norm, so it is
  // zero-mean with ||X||^2 = 1 exactly; the sum's second moment target is N.
  const double coordinate = 1.0 / std::sqrt(static_cast<double>(dimension));
  const double target = static_cast<double>(count);

  std::vector<long long> exceed(lambdas.size(), 0);
  double ratio_mean = 0.0;
  double ratio_m2 = 0.0;

  Vector sum(dimension);
  for (long long trial = 0; trial < trials; ++trial) {
    std::fill(sum.begin(), sum.end(), 0.0);
    std::uint64_t bits = 0;
    int bits_left = 0;
    for (long long i = 0; i < count; ++i) {
      for (int j = 0; j < dimension; ++j) {
        if (bits_left == 0) {
          bits = rng.next_u64();
          bits_left = 64;
        }
        sum[j] += (bits & 1u) ? coordinate : -coordinate;
        bits >>= 1;
        --bits_left;
      }
    }
    const double norm_sq = vec::dot(sum, sum);
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      if (norm_sq >= lambdas[k] * target) ++exceed[k];
    }
    const double ratio = norm_sq / target;
    const double delta = ratio - ratio_mean;
    ratio_mean += delta / static_cast<double>(trial + 1);
    ratio_m2 += delta * (ratio - ratio_mean);
  }

  ConcentrationResult result;
  result.count = count;
  result.dimension = dimension;
  result.trials = trials;
  result.mean_square_ratio = ratio_mean;
  result.mean_square_se =
      trials > 1 ? std::sqrt(ratio_m2 / (static_cast<double>(trials) - 1.0) /
                             static_cast<double>(trials))
                 : 0.0;
  result.rows.reserve(lambdas.size());
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    result.rows.push_back(ConcentrationRow{
        lambdas[k],
        static_cast<double>(exceed[k]) / static_cast<double>(trials),
        1.0 / lambdas[k]});
  }
  return result;
}

}  // namespace gfopt
