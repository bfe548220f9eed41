#include "gfopt/optimizer.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "gfopt/smoothing.hpp"

namespace gfopt {
namespace {

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be finite and > 0");
  }
}

void check_start(const StochasticObjective& obj, const Vector& x0) {
  if (static_cast<int>(x0.size()) != obj.dimension()) {
    throw std::invalid_argument("run: x0 has length " + std::to_string(x0.size()) +
                                ", objective dimension is " +
                                std::to_string(obj.dimension()));
  }
  if (!vec::all_finite(x0)) {
    throw std::invalid_argument("run: x0 has non-finite entries");
  }
}

[[noreturn]] void runtime_fault(long long t, const char* what) {
  std::ostringstream msg;
  msg << "run: non-finite " << what << " at iteration " << t;
  throw std::runtime_error(msg.str());
}

// Window accumulator: buffers the current window's probe points, and on
// completion records the mean and enforces the containment bound
// max_m ||z_m - mean|| <= (M - 1) * clip <= nu.
class WindowTracker {
 public:
  WindowTracker(long long window_size, long long window_count, double clip,
                double nu, bool retain)
      : window_size_(window_size),
        window_count_(window_count),
        clip_(clip),
        nu_(nu),
        retain_(retain) {
    means_.reserve(window_count);
    buffer_.reserve(window_size);
    if (retain_) windows_.reserve(window_count);
  }

  bool done() const {
    return static_cast<long long>(means_.size()) == window_count_;
  }

  void add(const Vector& z) {
    if (done()) return;
    buffer_.push_back(z);
    if (static_cast<long long>(buffer_.size()) < window_size_) return;

    Vector mean(z.size(), 0.0);
    for (const Vector& p : buffer_) {
      for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += p[j];
    }
    vec::scale_in_place(mean, 1.0 / static_cast<double>(window_size_));

    double worst = 0.0;
    for (const Vector& p : buffer_) {
      worst = std::max(worst, vec::dist(p, mean));
    }
    const double bound = static_cast<double>(window_size_ - 1) * clip_;
    if (worst > bound || worst > nu_) {
      std::ostringstream msg;
      msg << "run: window containment violated in window " << means_.size() + 1
          << ": max distance " << worst << " exceeds (M-1)*D = " << bound
          << " or nu = " << nu_;
      throw std::runtime_error(msg.str());
    }

    means_.push_back(std::move(mean));
    if (retain_) {
      windows_.push_back(std::move(buffer_));
      buffer_ = {};
      buffer_.reserve(window_size_);
    } else {
      buffer_.clear();
    }
  }

  const std::vector<Vector>& means() const { return means_; }
  std::vector<Vector> take_window(long long index_1based) {
    return std::move(windows_.at(index_1based - 1));
  }
  bool retained() const { return retain_; }

 private:
  long long window_size_;
  long long window_count_;
  double clip_;
  double nu_;
  bool retain_;
  std::vector<Vector> buffer_;
  std::vector<Vector> means_;
  std::vector<std::vector<Vector>> windows_;
};

}  // namespace

void OptimizerConfig::validate() const {
  check_positive(rho, "optimizer config: rho");
  check_positive(nu, "optimizer config: nu");
  check_positive(clip, "optimizer config: clip radius");
  check_positive(step, "optimizer config: step size");
  if (budget < 1) {
    throw std::invalid_argument("optimizer config: budget must be >= 1");
  }
  if (batch < 1) {
    throw std::invalid_argument("optimizer config: batch must be >= 1");
  }
  if (nu / clip > 9.0e15) {
    throw std::invalid_argument(
        "optimizer config: window size nu / clip is too large to enumerate");
  }
  const long long m = num::floor_snapped(nu / clip);
  if (m < 1) {
    std::ostringstream msg;
    msg << "optimizer config: window size M = floor(nu / clip) = " << m
        << " < 1 (clip radius " << clip << " exceeds nu " << nu << ")";
    throw std::invalid_argument(msg.str());
  }
  const long long k = budget / m;
  if (k < 1) {
    std::ostringstream msg;
    msg << "optimizer config: window count K = floor(budget / M) = " << k
        << " < 1 (budget " << budget << " below window size " << m << ")";
    throw std::invalid_argument(msg.str());
  }
}

OptimizerConfig derive_hyperparams(double value_gap, double lipschitz,
                                   double delta, double eps, int dimension,
                                   double budget_scale, long long batch) {
  check_positive(eps, "derive_hyperparams: eps");
  check_positive(budget_scale, "derive_hyperparams: budget scale");
  check_positive(value_gap, "derive_hyperparams: value gap");
  check_positive(lipschitz, "derive_hyperparams: Lipschitz bound");
  check_positive(delta, "derive_hyperparams: delta");
  if (dimension < 1) {
    throw std::invalid_argument("derive_hyperparams: dimension must be >= 1");
  }

  double rho = std::min(delta / 2.0, value_gap / lipschitz);
  double nu = delta - rho;
  const double budget_real = budget_scale * dimension * lipschitz * lipschitz *
                             (value_gap + rho * lipschitz) /
                             (nu * eps * eps * eps);
  if (!(budget_real < 4.0e18)) {
    throw std::invalid_argument("derive_hyperparams: budget overflows (" +
                                std::to_string(budget_real) + " iterations)");
  }
  const long long budget = std::max<long long>(1, num::ceil_snapped(budget_real));
  return derive_hyperparams_for_budget(value_gap, lipschitz, delta, dimension,
                                       budget, batch);
}

OptimizerConfig derive_hyperparams_for_budget(double value_gap, double lipschitz,
                                              double delta, int dimension,
                                              long long budget, long long batch) {
  check_positive(value_gap, "derive_hyperparams: value gap");
  check_positive(lipschitz, "derive_hyperparams: Lipschitz bound");
  check_positive(delta, "derive_hyperparams: delta");
  if (dimension < 1) {
    throw std::invalid_argument("derive_hyperparams: dimension must be >= 1");
  }
  if (budget < 1) {
    throw std::invalid_argument("derive_hyperparams: budget must be >= 1");
  }
  if (batch < 1) {
    throw std::invalid_argument("derive_hyperparams: batch must be >= 1");
  }

  double rho = std::min(delta / 2.0, value_gap / lipschitz);
  double nu = delta - rho;
  // Nudge the smaller summand so the pair sums back to delta bitwise; the
  // subtraction alone can be one ulp off.
  for (int i = 0; i < 3 && rho + nu != delta; ++i) {
    rho = delta - nu;
    if (rho + nu == delta) break;
    nu = delta - rho;
  }

  OptimizerConfig config;
  config.rho = rho;
  config.nu = nu;
  config.budget = budget;
  config.batch = batch;
  const double smoothed_gap = value_gap + rho * lipschitz;
  const double t = static_cast<double>(budget);
  config.clip = std::pow(smoothed_gap * std::sqrt(nu) /
                             (std::sqrt(static_cast<double>(dimension)) *
                              lipschitz * t),
                         2.0 / 3.0);
  config.step = smoothed_gap / (dimension * lipschitz * lipschitz * t);
  config.validate();
  return config;
}

Vector clip_to_ball(Vector v, double radius) {
  check_positive(radius, "clip_to_ball: radius");
  double n = vec::norm(v);
  // Rescaling can land a fraction of an ulp outside; repeat until inside.
  for (int i = 0; i < 8 && n > radius; ++i) {
    vec::scale_in_place(v, radius / n);
    n = vec::norm(v);
  }
  if (n > radius) {
    throw std::logic_error("clip_to_ball: rescaling failed to reach the ball");
  }
  return v;
}

RunResult run(const StochasticObjective& obj, const Vector& x0,
              const OptimizerConfig& config, RandomStream& rng,
              const RunOptions& options) {
  config.validate();
  check_start(obj, x0);

  const int d = obj.dimension();
  const long long window_size = config.window_size();
  const long long window_count = config.window_count();
  const long long covered = window_size * window_count;
  const bool retain = covered * d <= options.retain_limit;

  // Streaming replays re-derive the chosen window from a copy of the pre-loop
  // stream state instead of retaining every probe point.
  RandomStream replay_rng = rng;

  WindowTracker windows(window_size, window_count, config.clip, config.nu, retain);
  RunResult result;

  Vector x = x0;
  Vector displacement(d, 0.0);
  for (long long t = 1; t <= config.budget; ++t) {
    const double s = rng.uniform01();
    Vector z = x;
    vec::axpy(z, s, displacement);
    const Vector g = batched_grad_estimate(obj, z, config.rho, config.batch, rng);
    if (!vec::all_finite(g)) runtime_fault(t, "gradient estimate");

    if (options.trace.stride > 0 && (t - 1) % options.trace.stride == 0) {
      IterationRecord record;
      record.t = t;
      record.displacement_norm = vec::norm(displacement);
      record.grad_norm = vec::norm(g);
      if (options.trace.log_z) record.z = z;
      result.trajectory.push_back(std::move(record));
    }

    windows.add(z);

    vec::axpy(x, 1.0, displacement);
    if (!vec::all_finite(x)) runtime_fault(t, "iterate");
    vec::axpy(displacement, -config.step, g);
    displacement = clip_to_ball(std::move(displacement), config.clip);
    if (!vec::all_finite(displacement)) runtime_fault(t, "displacement");
  }

  const long long chosen = 1 + static_cast<long long>(
                                   rng.below(static_cast<std::uint64_t>(window_count)));
  result.chosen_window = chosen;
  result.x_out = windows.means().at(chosen - 1);
  result.evaluations_used = 2 * config.batch * config.budget;

  if (retain) {
    result.window_points = windows.take_window(chosen);
    return result;
  }

  // Deterministic replay of the loop to capture the chosen window's probes.
  const long long first = (chosen - 1) * window_size + 1;
  const long long last = chosen * window_size;
  result.window_points.reserve(window_size);
  Vector rx = x0;
  Vector rdisp(d, 0.0);
  for (long long t = 1; t <= last; ++t) {
    const double s = replay_rng.uniform01();
    Vector z = rx;
    vec::axpy(z, s, rdisp);
    const Vector g =
        batched_grad_estimate(obj, z, config.rho, config.batch, replay_rng);
    if (t >= first) result.window_points.push_back(std::move(z));
    if (t == last) break;
    vec::axpy(rx, 1.0, rdisp);
    vec::axpy(rdisp, -config.step, g);
    rdisp = clip_to_ball(std::move(rdisp), config.clip);
  }
  return result;
}

Vector baseline_sgd_smoothed(const StochasticObjective& obj, const Vector& x0,
                             double rho, double step, long long budget,
                             long long batch, RandomStream& rng) {
  check_positive(rho, "baseline_sgd_smoothed: rho");
  check_positive(step, "baseline_sgd_smoothed: step");
  if (budget < 1) {
    throw std::invalid_argument("baseline_sgd_smoothed: budget must be >= 1");
  }
  if (batch < 1) {
    throw std::invalid_argument("baseline_sgd_smoothed: batch must be >= 1");
  }
  check_start(obj, x0);

  const long long returned =
      static_cast<long long>(rng.below(static_cast<std::uint64_t>(budget)));
  Vector x = x0;
  Vector snapshot = x0;
  for (long long t = 0; t < budget; ++t) {
    if (t == returned) snapshot = x;
    const Vector g = batched_grad_estimate(obj, x, rho, batch, rng);
    vec::axpy(x, -step, g);
    if (!vec::all_finite(x)) runtime_fault(t + 1, "iterate");
  }
  return snapshot;
}

}  // namespace gfopt
