#include "gfopt/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gfopt/smoothing.hpp"

namespace gfopt {
namespace {

// Solves the square system A y = b by Gaussian elimination with partial
// pivoting. A is row-major n x n and is destroyed. Returns false when a pivot
// collapses (affinely dependent corral).
bool solve_dense(std::vector<double>& a, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a[col * n + col]);
    for (int row = col + 1; row < n; ++row) {
      const double v = std::abs(a[row * n + col]);
      if (v > best) {
        best = v;
        pivot = row;
      }
    }
    if (!(best > 1e-300)) return false;
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
      std::swap(b[col], b[pivot]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (int row = col + 1; row < n; ++row) {
      const double factor = a[row * n + col] * inv;
      if (factor == 0.0) continue;
      for (int j = col; j < n; ++j) a[row * n + j] -= factor * a[col * n + j];
      b[row] -= factor * b[col];
    }
  }
  for (int row = n - 1; row >= 0; --row) {
    double s = b[row];
    for (int j = row + 1; j < n; ++j) s -= a[row * n + j] * b[j];
    b[row] = s / a[row * n + row];
  }
  return true;
}

// Least-norm affine combination of the corral: minimize ||sum a_i p_i||^2
// subject to sum a_i = 1, via the bordered KKT system
//   [ G   1 ] [a ]   [0]
//   [ 1^T 0 ] [mu] = [1].
std::vector<double> affine_minimizer(const std::vector<Vector>& points,
                                     const std::vector<int>& corral) {
  const int m = static_cast<int>(corral.size());
  const int n = m + 1;
  std::vector<double> a(n * n, 0.0);
  std::vector<double> b(n, 0.0);
  double scale = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      const double gij = vec::dot(points[corral[i]], points[corral[j]]);
      a[i * n + j] = gij;
      a[j * n + i] = gij;
      scale = std::max(scale, std::abs(gij));
    }
    a[i * n + m] = 1.0;
    a[m * n + i] = 1.0;
  }
  b[m] = 1.0;

  std::vector<double> saved = a;
  std::vector<double> rhs = b;
  if (!solve_dense(a, b, n)) {
    // Degenerate Gram matrix (e.g. affinely dependent gradients); retry with
    // a tiny ridge on the diagonal.
    a = std::move(saved);
    b = std::move(rhs);
    const double ridge = 1e-12 * std::max(1.0, scale);
    for (int i = 0; i < m; ++i) a[i * n + i] += ridge;
    if (!solve_dense(a, b, n)) {
      throw std::runtime_error(
          "min_norm_in_hull: affine subproblem is numerically singular");
    }
  }
  b.resize(m);
  return b;
}

Vector combination(const std::vector<Vector>& points,
                   const std::vector<int>& corral,
                   const std::vector<double>& weights) {
  Vector out(points[corral[0]].size(), 0.0);
  for (std::size_t i = 0; i < corral.size(); ++i) {
    vec::axpy(out, weights[i], points[corral[i]]);
  }
  return out;
}

}  // namespace

std::string to_string(CertificateMethod method) {
  switch (method) {
    case CertificateMethod::sampled_hull:
      return "sampled_hull";
    case CertificateMethod::window_average:
      return "window_average";
  }
  return "unknown";
}

MinNormPoint min_norm_in_hull(const std::vector<Vector>& points, double tol,
                              long long max_iterations) {
  if (points.empty()) {
    throw std::invalid_argument("min_norm_in_hull: point set is empty");
  }
  const std::size_t d = points.front().size();
  for (const Vector& p : points) {
    if (p.size() != d) {
      throw std::invalid_argument("min_norm_in_hull: mixed dimensions");
    }
    if (!vec::all_finite(p)) {
      throw std::invalid_argument("min_norm_in_hull: non-finite point");
    }
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("min_norm_in_hull: tol must be > 0");
  }
  const long long n = static_cast<long long>(points.size());
  const long long cap = max_iterations > 0
                            ? max_iterations
                            : std::max<long long>(64, 10 * n * static_cast<long long>(d));

  // Start from the shortest input point.
  int start = 0;
  for (int i = 1; i < n; ++i) {
    if (vec::dot(points[i], points[i]) < vec::dot(points[start], points[start])) {
      start = i;
    }
  }
  std::vector<int> corral{start};
  std::vector<double> weights{1.0};
  Vector current = points[start];

  long long iterations = 0;
  double residual = 0.0;
  bool converged = false;
  while (iterations < cap) {
    ++iterations;
    // Optimality over the whole set: min_i <g*, p_i - g*> >= -tol (1+||g*||^2).
    const double norm_sq = vec::dot(current, current);
    int best = 0;
    double best_score = vec::dot(current, points[0]);
    for (int i = 1; i < n; ++i) {
      const double score = vec::dot(current, points[i]);
      if (score < best_score) {
        best_score = score;
        best = i;
      }
    }
    residual = norm_sq - best_score;
    if (best_score >= norm_sq - tol * (1.0 + norm_sq)) {
      converged = true;
      break;
    }
    if (std::find(corral.begin(), corral.end(), best) == corral.end()) {
      corral.push_back(best);
      weights.push_back(0.0);
    }

    // Minor cycle: walk toward the affine minimizer, dropping points whose
    // weight hits zero, until it is feasible for the simplex.
    for (;;) {
      if (iterations >= cap) break;
      std::vector<double> affine = affine_minimizer(points, corral);
      double lowest = affine[0];
      for (double v : affine) lowest = std::min(lowest, v);
      if (lowest > -1e-12) {
        weights = std::move(affine);
        break;
      }
      ++iterations;
      double theta = 1.0;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        if (affine[i] <= 0.0 && weights[i] > affine[i]) {
          theta = std::min(theta, weights[i] / (weights[i] - affine[i]));
        }
      }
      std::vector<int> next_corral;
      std::vector<double> next_weights;
      for (std::size_t i = 0; i < corral.size(); ++i) {
        const double w = (1.0 - theta) * weights[i] + theta * affine[i];
        if (w > 1e-12) {
          next_corral.push_back(corral[i]);
          next_weights.push_back(w);
        }
      }
      if (next_corral.empty()) {
        // Numerical breakdown; keep the best single point and stop shrinking.
        next_corral.push_back(corral[0]);
        next_weights.push_back(1.0);
      }
      corral = std::move(next_corral);
      weights = std::move(next_weights);
    }
    current = combination(points, corral, weights);
  }

  if (!converged) {
    std::ostringstream msg;
    msg << "min_norm_in_hull: iteration cap " << cap
        << " exceeded before tolerance; optimality residual " << residual;
    throw std::runtime_error(msg.str());
  }

  // Clean the weights into an exact simplex point and rebuild the output from
  // them so the reconstruction identity is exact.
  double total = 0.0;
  for (double& w : weights) {
    if (w < 0.0) w = 0.0;
    total += w;
  }
  if (!(total > 0.0)) {
    throw std::runtime_error("min_norm_in_hull: degenerate weights");
  }
  for (double& w : weights) w /= total;

  MinNormPoint result;
  result.coefficients.assign(points.size(), 0.0);
  for (std::size_t i = 0; i < corral.size(); ++i) {
    result.coefficients[corral[i]] = weights[i];
  }
  result.point = combination(points, corral, weights);
  result.norm = vec::norm(result.point);
  result.iterations = static_cast<int>(iterations);
  return result;
}

StationarityCertificate goldstein_upper_certificate(const StochasticObjective& obj,
                                                    const Vector& x, double delta,
                                                    long long samples,
                                                    RandomStream& rng) {
  if (!obj.has_gradient_oracle()) {
    throw std::logic_error(
        "goldstein_upper_certificate: objective provides no gradient oracle");
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("goldstein_upper_certificate: delta must be > 0");
  }
  if (samples < 1) {
    throw std::invalid_argument("goldstein_upper_certificate: samples must be >= 1");
  }

  // Exact duplicates are common for piecewise-linear objectives; the hull is
  // unchanged by removing them and the solver gets a far smaller set.
  std::set<Vector> unique;
  Vector y(x.size());
  for (long long i = 0; i < samples; ++i) {
    const Vector z = sample_unit_ball(obj.dimension(), rng);
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = x[j] + delta * z[j];
    unique.insert(obj.reference_gradient(y));
  }
  std::vector<Vector> gradients(unique.begin(), unique.end());
  const MinNormPoint min_norm = min_norm_in_hull(gradients);

  StationarityCertificate certificate;
  certificate.delta = delta;
  certificate.value = min_norm.norm;
  certificate.std_error = 0.0;
  certificate.method = CertificateMethod::sampled_hull;
  certificate.n_gradients = samples;
  return certificate;
}

StationarityCertificate window_certificate(const StochasticObjective& obj,
                                           const std::vector<Vector>& window_points,
                                           double rho, long long samples_per_point,
                                           RandomStream& rng) {
  if (window_points.empty()) {
    throw std::invalid_argument("window_certificate: window is empty");
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("window_certificate: rho must be > 0");
  }
  if (samples_per_point < 1) {
    throw std::invalid_argument("window_certificate: samples must be >= 1");
  }

  const std::size_t d = window_points.front().size();
  const double count = static_cast<double>(window_points.size());
  Vector mean(d, 0.0);
  Vector variance_sum(d, 0.0);
  Vector centroid(d, 0.0);
  for (const Vector& z : window_points) {
    const MonteCarloVector estimate =
        smoothed_grad_mc(obj, z, rho, samples_per_point, rng);
    vec::axpy(mean, 1.0 / count, estimate.mean);
    for (std::size_t j = 0; j < d; ++j) {
      variance_sum[j] += estimate.std_error[j] * estimate.std_error[j];
    }
    vec::axpy(centroid, 1.0 / count, z);
  }

  Vector std_error(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    std_error[j] = std::sqrt(variance_sum[j]) / count;
  }
  double spread = 0.0;
  for (const Vector& z : window_points) {
    spread = std::max(spread, vec::dist(z, centroid));
  }

  StationarityCertificate certificate;
  certificate.delta = rho + spread;
  certificate.value = vec::norm(mean);
  certificate.std_error = vec::norm(std_error);
  certificate.method = CertificateMethod::window_average;
  certificate.n_gradients =
      static_cast<long long>(window_points.size()) * samples_per_point;
  return certificate;
}

}  // namespace gfopt
