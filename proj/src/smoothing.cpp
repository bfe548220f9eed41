#include "gfopt/smoothing.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gfopt {
namespace {

void check_rho(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("smoothing radius must be finite and > 0");
  }
}

void check_samples(long long n, const char* what) {
  if (n < 1) {
    throw std::invalid_argument(std::string(what) + ": sample count must be >= 1");
  }
}

void fill_unit_sphere(Vector& w, RandomStream& rng) {
  for (;;) {
    double sumsq = 0.0;
    for (double& c : w) {
      c = rng.normal();
      sumsq += c * c;
    }
    if (sumsq > 0.0) {
      const double inv = 1.0 / std::sqrt(sumsq);
      for (double& c : w) c *= inv;
      return;
    }
    // All-zero draw has probability zero; redraw keeps the contract exact.
  }
}

// The two-point difference quotient d/(2 rho) (F(x+rho w) - F(x-rho w)) under
// a shared component. `plus`/`minus` are scratch buffers of length d.
double two_point_scale(const StochasticObjective& obj, std::span<const double> x,
                       double rho, const NoiseComponent& xi,
                       std::span<const double> w, Vector& plus, Vector& minus) {
  for (std::size_t j = 0; j < plus.size(); ++j) {
    plus[j] = x[j] + rho * w[j];
    minus[j] = x[j] - rho * w[j];
  }
  const double forward = obj.evaluate(plus, xi);
  const double backward = obj.evaluate(minus, xi);
  return static_cast<double>(plus.size()) / (2.0 * rho) * (forward - backward);
}

// Streaming per-coordinate mean / second moment (Welford). Samples are folded
// in draw order so the reduction is deterministic given the stream.
class RunningMoments {
 public:
  explicit RunningMoments(std::size_t width) : mean_(width, 0.0), m2_(width, 0.0) {}

  // Folds in the vector scale * w without materializing it.
  void add_scaled(std::span<const double> w, double scale) {
    ++count_;
    for (std::size_t i = 0; i < mean_.size(); ++i) {
      const double value = scale * w[i];
      const double delta = value - mean_[i];
      mean_[i] += delta / static_cast<double>(count_);
      m2_[i] += delta * (value - mean_[i]);
    }
  }

  void add_scalar(double value) { add_scaled(std::span<const double>(&value, 1), 1.0); }

  const Vector& mean() const { return mean_; }

  Vector std_error() const {
    Vector se(mean_.size(), 0.0);
    if (count_ > 1) {
      const double n = static_cast<double>(count_);
      for (std::size_t i = 0; i < se.size(); ++i) {
        se[i] = std::sqrt(std::max(0.0, m2_[i]) / (n - 1.0) / n);
      }
    }
    return se;
  }

 private:
  long long count_ = 0;
  Vector mean_;
  Vector m2_;
};

// Shared loop behind batched_grad_estimate and smoothed_grad_mc: `samples`
// fresh (component, direction) estimator draws folded into `acc`.
void accumulate_estimator_samples(const StochasticObjective& obj,
                                  std::span<const double> x, double rho,
                                  long long samples, RandomStream& rng,
                                  RunningMoments& acc) {
  check_rho(rho);
  const int d = obj.dimension();
  if (static_cast<int>(x.size()) != d) {
    throw std::invalid_argument("estimator: dimension mismatch");
  }
  Vector w(d), plus(d), minus(d);
  for (long long i = 0; i < samples; ++i) {
    const NoiseComponent xi = obj.sample_component(rng);
    fill_unit_sphere(w, rng);
    const double scale = two_point_scale(obj, x, rho, xi, w, plus, minus);
    acc.add_scaled(w, scale);
  }
}

}  // namespace

Vector sample_unit_sphere(int dimension, RandomStream& rng) {
  if (dimension < 1) {
    throw std::invalid_argument("sample_unit_sphere: dimension must be >= 1");
  }
  Vector w(dimension);
  fill_unit_sphere(w, rng);
  return w;
}

Vector sample_unit_ball(int dimension, RandomStream& rng) {
  Vector z = sample_unit_sphere(dimension, rng);
  const double radius =
      std::pow(rng.uniform01(), 1.0 / static_cast<double>(dimension));
  vec::scale_in_place(z, radius);
  return z;
}

EstimatorSample grad_estimate(const StochasticObjective& obj,
                              std::span<const double> x, double rho,
                              const NoiseComponent& xi,
                              std::span<const double> direction) {
  check_rho(rho);
  const int d = obj.dimension();
  if (static_cast<int>(x.size()) != d || static_cast<int>(direction.size()) != d) {
    throw std::invalid_argument("grad_estimate: dimension mismatch");
  }
  const double dir_norm = vec::norm(direction);
  if (std::abs(dir_norm - 1.0) > 1e-9) {
    throw std::invalid_argument("grad_estimate: direction must be a unit vector");
  }

  EstimatorSample sample;
  sample.direction.assign(direction.begin(), direction.end());
  Vector plus(d), minus(d);
  const double scale = two_point_scale(obj, x, rho, xi, sample.direction, plus, minus);
  sample.g.resize(d);
  for (int j = 0; j < d; ++j) sample.g[j] = scale * sample.direction[j];
  sample.component = xi;
  return sample;
}

Vector batched_grad_estimate(const StochasticObjective& obj,
                             std::span<const double> x, double rho,
                             long long batch, RandomStream& rng) {
  check_samples(batch, "batched_grad_estimate");
  RunningMoments acc(x.size());
  accumulate_estimator_samples(obj, x, rho, batch, rng, acc);
  return acc.mean();
}

MonteCarloValue smoothed_value_mc(const StochasticObjective& obj,
                                  std::span<const double> x, double rho,
                                  long long samples, RandomStream& rng) {
  check_rho(rho);
  check_samples(samples, "smoothed_value_mc");
  const int d = obj.dimension();
  if (static_cast<int>(x.size()) != d) {
    throw std::invalid_argument("smoothed_value_mc: dimension mismatch");
  }
  RunningMoments acc(1);
  Vector z(d), point(d);
  for (long long i = 0; i < samples; ++i) {
    const NoiseComponent xi = obj.sample_component(rng);
    fill_unit_sphere(z, rng);
    const double radius = std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
    for (int j = 0; j < d; ++j) point[j] = x[j] + rho * (radius * z[j]);
    acc.add_scalar(obj.evaluate(point, xi));
  }
  return MonteCarloValue{acc.mean()[0], acc.std_error()[0], samples};
}

MonteCarloVector smoothed_grad_mc(const StochasticObjective& obj,
                                  std::span<const double> x, double rho,
                                  long long samples, RandomStream& rng) {
  check_samples(samples, "smoothed_grad_mc");
  RunningMoments acc(x.size());
  accumulate_estimator_samples(obj, x, rho, samples, rng, acc);
  return MonteCarloVector{acc.mean(), acc.std_error(), samples};
}

}  // namespace gfopt
