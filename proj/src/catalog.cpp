#include "gfopt/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "gfopt/smoothing.hpp"

namespace gfopt {
namespace {

enum class BaseKind { euclidean_norm, abs_sum, max_affine, sphere_valley };

double parse_double(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("objective param " + key + ": '" + text +
                                "' is not a number");
  }
  if (pos != text.size() || !std::isfinite(v)) {
    throw std::invalid_argument("objective param " + key + ": '" + text +
                                "' is not a finite number");
  }
  return v;
}

Vector parse_vector(const std::string& key, const std::string& text, int dimension) {
  Vector out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    std::istringstream parts(token);
    std::string word;
    while (parts >> word) out.push_back(parse_double(key, word));
  }
  if (static_cast<int>(out.size()) != dimension) {
    throw std::invalid_argument("objective param " + key + ": expected " +
                                std::to_string(dimension) + " entries, got " +
                                std::to_string(out.size()));
  }
  return out;
}

const Vector& payload_vector(const NoiseComponent& xi, std::size_t expected,
                             const char* what) {
  const auto* v = std::get_if<Vector>(&xi.payload);
  if (v == nullptr || v->size() != expected) {
    throw std::invalid_argument(std::string("noise component: ") + what);
  }
  return *v;
}

double payload_scalar(const NoiseComponent& xi) {
  const auto* v = std::get_if<double>(&xi.payload);
  if (v == nullptr) {
    throw std::invalid_argument(
        "noise component: expected a scalar payload for this family");
  }
  return *v;
}

class BuiltinObjective final : public StochasticObjective {
 public:
  BuiltinObjective(BaseKind base, int dimension, std::vector<AffinePiece> pieces,
                   NoiseFamily noise, double noise_scale, double base_lipschitz,
                   double declared_lipschitz, std::string family,
                   std::optional<double> infimum, bool gradient_oracle)
      : StochasticObjective(dimension, declared_lipschitz, std::move(family), infimum),
        base_(base),
        pieces_(std::move(pieces)),
        noise_(noise),
        noise_scale_(noise_scale),
        base_lipschitz_(base_lipschitz),
        gradient_oracle_(gradient_oracle) {}

  NoiseComponent sample_component(RandomStream& rng) const override {
    switch (noise_) {
      case NoiseFamily::none:
        return NoiseComponent{};
      case NoiseFamily::additive_scalar:
        return NoiseComponent{rng.uniform(-noise_scale_, noise_scale_)};
      case NoiseFamily::additive_linear: {
        Vector z = sample_unit_ball(dimension(), rng);
        vec::scale_in_place(z, noise_scale_);
        return NoiseComponent{std::move(z)};
      }
      case NoiseFamily::piece_offsets: {
        Vector offsets(pieces_.size());
        for (double& o : offsets) o = rng.uniform(-noise_scale_, noise_scale_);
        return NoiseComponent{std::move(offsets)};
      }
    }
    throw std::logic_error("unreachable noise family");
  }

  NoiseComponent neutral_component() const override {
    switch (noise_) {
      case NoiseFamily::none:
        return NoiseComponent{};
      case NoiseFamily::additive_scalar:
        return NoiseComponent{0.0};
      case NoiseFamily::additive_linear:
        return NoiseComponent{Vector(dimension(), 0.0)};
      case NoiseFamily::piece_offsets:
        return NoiseComponent{Vector(pieces_.size(), 0.0)};
    }
    throw std::logic_error("unreachable noise family");
  }

  double component_lipschitz(const NoiseComponent& xi) const override {
    if (noise_ == NoiseFamily::additive_linear) {
      return base_lipschitz_ +
             vec::norm(payload_vector(xi, dimension(), "expected a vector payload"));
    }
    return base_lipschitz_;
  }

  bool has_gradient_oracle() const override { return gradient_oracle_; }

 protected:
  double eval_impl(std::span<const double> x, const NoiseComponent& xi) const override {
    double value = 0.0;
    switch (base_) {
      case BaseKind::euclidean_norm:
        value = vec::norm(x);
        break;
      case BaseKind::abs_sum:
        for (double v : x) value += std::abs(v);
        break;
      case BaseKind::sphere_valley:
        value = std::abs(vec::norm(x) - 1.0);
        break;
      case BaseKind::max_affine: {
        const Vector* offsets = nullptr;
        if (noise_ == NoiseFamily::piece_offsets) {
          offsets = &payload_vector(xi, pieces_.size(),
                                    "expected one offset per affine piece");
        }
        value = piece_value(0, x, offsets);
        for (std::size_t i = 1; i < pieces_.size(); ++i) {
          value = std::max(value, piece_value(i, x, offsets));
        }
        break;
      }
    }
    switch (noise_) {
      case NoiseFamily::additive_scalar:
        value += payload_scalar(xi);
        break;
      case NoiseFamily::additive_linear:
        value += vec::dot(payload_vector(xi, dimension(), "expected a vector payload"), x);
        break;
      default:
        break;
    }
    return value;
  }

  // Gradient of f = E[F]; the mean-zero noise families leave f equal to the
  // base function. Kink selections are fixed and documented: radial terms at
  // the origin pick the zero vector, absolute values pick the +t branch,
  // max-affine ties pick the lowest piece index.
  Vector gradient_impl(std::span<const double> x) const override {
    const int d = dimension();
    Vector g(d, 0.0);
    switch (base_) {
      case BaseKind::euclidean_norm: {
        const double n = vec::norm(x);
        if (n > 0.0) {
          for (int i = 0; i < d; ++i) g[i] = x[i] / n;
        }
        break;
      }
      case BaseKind::abs_sum:
        for (int i = 0; i < d; ++i) g[i] = x[i] < 0.0 ? -1.0 : 1.0;
        break;
      case BaseKind::sphere_valley: {
        const double n = vec::norm(x);
        if (n > 0.0) {
          const double sign = n >= 1.0 ? 1.0 : -1.0;
          for (int i = 0; i < d; ++i) g[i] = sign * x[i] / n;
        }
        break;
      }
      case BaseKind::max_affine: {
        std::size_t best = 0;
        double best_value = piece_value(0, x, nullptr);
        for (std::size_t i = 1; i < pieces_.size(); ++i) {
          const double v = piece_value(i, x, nullptr);
          if (v > best_value) {
            best = i;
            best_value = v;
          }
        }
        g = pieces_[best].slope;
        break;
      }
    }
    return g;
  }

 private:
  double piece_value(std::size_t i, std::span<const double> x,
                     const Vector* offsets) const {
    double v = vec::dot(pieces_[i].slope, x) + pieces_[i].intercept;
    if (offsets != nullptr) v += (*offsets)[i];
    return v;
  }

  BaseKind base_;
  std::vector<AffinePiece> pieces_;
  NoiseFamily noise_;
  double noise_scale_;
  double base_lipschitz_;
  bool gradient_oracle_;
};

std::string family_label(const std::string& base, NoiseFamily noise, double scale) {
  switch (noise) {
    case NoiseFamily::none:
      return base + " (exact evaluations)";
    case NoiseFamily::additive_scalar:
      return base + " + scalar offset Unif[-" + std::to_string(scale) + ", " +
             std::to_string(scale) + "]";
    case NoiseFamily::additive_linear:
      return base + " + linear term, coefficient uniform in the " +
             std::to_string(scale) + "-ball";
    case NoiseFamily::piece_offsets:
      return base + " + per-piece intercept offsets Unif[-" +
             std::to_string(scale) + ", " + std::to_string(scale) + "]";
  }
  return base;
}

NoiseFamily parse_noise(const std::string& text) {
  if (text == "none") return NoiseFamily::none;
  if (text == "additive_scalar") return NoiseFamily::additive_scalar;
  if (text == "additive_linear") return NoiseFamily::additive_linear;
  if (text == "piece_offsets") return NoiseFamily::piece_offsets;
  throw std::invalid_argument("unknown noise family '" + text +
                              "' (expected none, additive_scalar, "
                              "additive_linear or piece_offsets)");
}

std::unique_ptr<StochasticObjective> build(BaseKind base, const std::string& name,
                                           int dimension,
                                           std::vector<AffinePiece> pieces,
                                           NoiseFamily noise, double noise_scale,
                                           std::optional<double> infimum) {
  double base_lipschitz = 0.0;
  switch (base) {
    case BaseKind::euclidean_norm:
    case BaseKind::sphere_valley:
      base_lipschitz = 1.0;
      break;
    case BaseKind::abs_sum:
      base_lipschitz = std::sqrt(static_cast<double>(dimension));
      break;
    case BaseKind::max_affine:
      for (const AffinePiece& p : pieces) {
        base_lipschitz = std::max(base_lipschitz, vec::norm(p.slope));
      }
      break;
  }
  // E[L(xi)^2] <= (base + noise_norm)^2 for the linear family; the other
  // families keep the per-component constant unchanged.
  const double declared = noise == NoiseFamily::additive_linear
                              ? base_lipschitz + noise_scale
                              : base_lipschitz;
  // The expected perturbed max is not the base max, so the exact oracle is
  // only available for the families with f identical to the base function.
  const bool oracle = noise != NoiseFamily::piece_offsets;
  if (noise == NoiseFamily::piece_offsets) infimum = std::nullopt;
  return std::make_unique<BuiltinObjective>(
      base, dimension, std::move(pieces), noise, noise_scale, base_lipschitz,
      declared, family_label(name, noise, noise_scale), infimum, oracle);
}

}  // namespace

std::unique_ptr<StochasticObjective> make_builtin(
    const std::string& name, int dimension,
    const std::map<std::string, std::string>& params) {
  if (dimension < 1) {
    throw std::invalid_argument("make_builtin: dimension must be >= 1");
  }

  NoiseFamily noise = NoiseFamily::none;
  double half_width = 0.5;
  double noise_norm = 0.5;
  std::map<int, AffinePiece> piece_map;
  for (const auto& [key, value] : params) {
    if (key == "noise") {
      noise = parse_noise(value);
    } else if (key == "half_width") {
      half_width = parse_double(key, value);
      if (half_width <= 0.0) {
        throw std::invalid_argument("objective param half_width must be > 0");
      }
    } else if (key == "noise_norm") {
      noise_norm = parse_double(key, value);
      if (noise_norm <= 0.0) {
        throw std::invalid_argument("objective param noise_norm must be > 0");
      }
    } else if (key.size() > 1 && (key[0] == 'a' || key[0] == 'b') &&
               key.find_first_not_of("0123456789", 1) == std::string::npos) {
      if (name != "max_affine") {
        throw std::invalid_argument("objective param " + key +
                                    " only applies to max_affine");
      }
      const int index = std::stoi(key.substr(1));
      if (key[0] == 'a') {
        piece_map[index].slope = parse_vector(key, value, dimension);
      } else {
        piece_map[index].intercept = parse_double(key, value);
      }
    } else {
      throw std::invalid_argument("unknown objective param '" + key + "'");
    }
  }

  const double scale = noise == NoiseFamily::additive_linear ? noise_norm : half_width;

  if (name == "euclidean_norm" || name == "abs_sum" || name == "sphere_valley") {
    if (!piece_map.empty()) {
      throw std::invalid_argument("piece params only apply to max_affine");
    }
    if (noise == NoiseFamily::piece_offsets) {
      throw std::invalid_argument("piece_offsets noise only applies to max_affine");
    }
    const BaseKind base = name == "euclidean_norm" ? BaseKind::euclidean_norm
                          : name == "abs_sum"      ? BaseKind::abs_sum
                                                   : BaseKind::sphere_valley;
    return build(base, name, dimension, {}, noise, scale, 0.0);
  }

  if (name == "max_affine") {
    std::vector<AffinePiece> pieces;
    std::optional<double> infimum;
    if (piece_map.empty()) {
      // Default: the +-e_i cross, i.e. f(x) = max_i |x_i|.
      pieces.reserve(2 * dimension);
      for (int i = 0; i < dimension; ++i) {
        for (double sign : {1.0, -1.0}) {
          AffinePiece p;
          p.slope.assign(dimension, 0.0);
          p.slope[i] = sign;
          pieces.push_back(std::move(p));
        }
      }
      infimum = 0.0;
    } else {
      for (auto& [index, piece] : piece_map) {
        if (piece.slope.empty()) {
          throw std::invalid_argument("max_affine piece " + std::to_string(index) +
                                      " has an intercept but no slope a" +
                                      std::to_string(index));
        }
        pieces.push_back(std::move(piece));
      }
      bool all_zero = true;
      for (const AffinePiece& p : pieces) {
        if (vec::norm(p.slope) != 0.0) all_zero = false;
      }
      if (all_zero) {
        double c = pieces.front().intercept;
        for (const AffinePiece& p : pieces) c = std::max(c, p.intercept);
        infimum = c;
      }
    }
    return build(BaseKind::max_affine, name, dimension, std::move(pieces), noise,
                 scale, infimum);
  }

  throw std::invalid_argument("unknown objective '" + name +
                              "' (expected euclidean_norm, abs_sum, max_affine "
                              "or sphere_valley)");
}

std::unique_ptr<StochasticObjective> make_max_affine(int dimension,
                                                     std::vector<AffinePiece> pieces,
                                                     NoiseFamily noise,
                                                     double noise_scale) {
  if (pieces.empty()) {
    throw std::invalid_argument("make_max_affine: need at least one piece");
  }
  for (const AffinePiece& p : pieces) {
    if (static_cast<int>(p.slope.size()) != dimension) {
      throw std::invalid_argument("make_max_affine: piece slope length mismatch");
    }
  }
  if (noise != NoiseFamily::none && noise_scale <= 0.0) {
    throw std::invalid_argument("make_max_affine: noise_scale must be > 0");
  }
  std::optional<double> infimum;
  bool all_zero = true;
  for (const AffinePiece& p : pieces) {
    if (vec::norm(p.slope) != 0.0) all_zero = false;
  }
  if (all_zero) {
    double c = pieces.front().intercept;
    for (const AffinePiece& p : pieces) c = std::max(c, p.intercept);
    infimum = c;
  }
  return build(BaseKind::max_affine, "max_affine", dimension, std::move(pieces),
               noise, noise_scale, infimum);
}

std::unique_ptr<StochasticObjective> make_linear(Vector slope) {
  const int dimension = static_cast<int>(slope.size());
  std::vector<AffinePiece> pieces;
  pieces.push_back(AffinePiece{std::move(slope), 0.0});
  return build(BaseKind::max_affine, "linear", dimension, std::move(pieces),
               NoiseFamily::none, 0.0, std::nullopt);
}

}  // namespace gfopt
