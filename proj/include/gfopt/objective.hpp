#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "gfopt/rng.hpp"
#include "gfopt/vec.hpp"

namespace gfopt {

/// One realized draw of the component distribution. The payload shape depends
/// on the noise family: nothing (degenerate), a scalar offset, or a vector.
/// Evaluation must be a pure function of (x, payload) so replays are
/// bit-identical.
struct NoiseComponent {
  std::variant<std::monostate, double, Vector> payload;
};

/// A stochastic objective f(x) = E[F(x; xi)] whose components F(.; xi) are
/// L(xi)-Lipschitz with E[L(xi)^2] <= lipschitz_bound()^2. Catalog objectives
/// enforce the bound by construction; user-supplied ones carry it as a
/// documented obligation.
class StochasticObjective {
 public:
  virtual ~StochasticObjective() = default;

  int dimension() const { return dimension_; }
  double lipschitz_bound() const { return lipschitz_bound_; }
  const std::string& component_family() const { return component_family_; }
  std::optional<double> known_infimum() const { return known_infimum_; }

  /// F(x; xi). Pure and deterministic in (x, xi).
  double evaluate(std::span<const double> x, const NoiseComponent& xi) const {
    check_point(x);
    return eval_impl(x, xi);
  }

  /// I.i.d. draw from the component distribution; deterministic given the
  /// stream state. Default: degenerate distribution on the empty payload.
  virtual NoiseComponent sample_component(RandomStream& rng) const {
    (void)rng;
    return NoiseComponent{};
  }

  /// A payload with zero noise (the distribution's center). Evaluating with
  /// it recovers f itself for the mean-zero catalog families.
  virtual NoiseComponent neutral_component() const { return NoiseComponent{}; }

  /// L(xi) for a realized component.
  virtual double component_lipschitz(const NoiseComponent& xi) const {
    (void)xi;
    return lipschitz_bound_;
  }

  virtual bool has_gradient_oracle() const { return false; }

  /// Exact gradient of f at differentiable points. At nondifferentiable
  /// points returns one fixed, documented Clarke-subgradient selection
  /// (tie-break: lexicographically-first active piece).
  Vector reference_gradient(std::span<const double> x) const {
    if (!has_gradient_oracle()) {
      throw std::logic_error("reference_gradient: objective '" +
                             component_family_ +
                             "' provides no exact-gradient oracle");
    }
    check_point(x);
    return gradient_impl(x);
  }

 protected:
  StochasticObjective(int dimension, double lipschitz_bound,
                      std::string component_family,
                      std::optional<double> known_infimum = std::nullopt)
      : dimension_(dimension),
        lipschitz_bound_(lipschitz_bound),
        component_family_(std::move(component_family)),
        known_infimum_(known_infimum) {
    if (dimension_ < 1) {
      throw std::invalid_argument("objective dimension must be >= 1");
    }
    if (!(lipschitz_bound_ >= 0.0) || !std::isfinite(lipschitz_bound_)) {
      throw std::invalid_argument("objective Lipschitz bound must be finite and >= 0");
    }
  }

  virtual double eval_impl(std::span<const double> x,
                           const NoiseComponent& xi) const = 0;

  virtual Vector gradient_impl(std::span<const double> x) const {
    (void)x;
    throw std::logic_error("gradient_impl not provided");
  }

  void check_point(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension_) {
      throw std::invalid_argument(
          "objective: point has length " + std::to_string(x.size()) +
          ", expected " + std::to_string(dimension_));
    }
    if (!vec::all_finite(x)) {
      throw std::invalid_argument("objective: point has non-finite entries");
    }
  }

 private:
  int dimension_;
  double lipschitz_bound_;
  std::string component_family_;
  std::optional<double> known_infimum_;
};

/// Adapter for ad-hoc objectives defined by callables. Used heavily in tests;
/// the Lipschitz bound is the caller's responsibility.
class CallableObjective final : public StochasticObjective {
 public:
  using EvalFn = std::function<double(std::span<const double>, const NoiseComponent&)>;
  using GradFn = std::function<Vector(std::span<const double>)>;
  using SampleFn = std::function<NoiseComponent(RandomStream&)>;

  CallableObjective(int dimension, double lipschitz_bound, std::string family,
                    EvalFn eval, GradFn grad = nullptr, SampleFn sample = nullptr,
                    std::optional<double> known_infimum = std::nullopt)
      : StochasticObjective(dimension, lipschitz_bound, std::move(family),
                            known_infimum),
        eval_(std::move(eval)),
        grad_(std::move(grad)),
        sample_(std::move(sample)) {}

  NoiseComponent sample_component(RandomStream& rng) const override {
    return sample_ ? sample_(rng) : NoiseComponent{};
  }

  bool has_gradient_oracle() const override { return static_cast<bool>(grad_); }

 protected:
  double eval_impl(std::span<const double> x,
                   const NoiseComponent& xi) const override {
    return eval_(x, xi);
  }

  Vector gradient_impl(std::span<const double> x) const override {
    return grad_(x);
  }

 private:
  EvalFn eval_;
  GradFn grad_;
  SampleFn sample_;
};

}  // namespace gfopt
