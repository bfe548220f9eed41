#pragma once

#include <string>
#include <vector>

#include "gfopt/objective.hpp"
#include "gfopt/rng.hpp"
#include "gfopt/vec.hpp"

namespace gfopt {

enum class CertificateMethod { sampled_hull, window_average };

std::string to_string(CertificateMethod method);

/// An upper-bound estimate of the norm of the minimum-norm element of the
/// Goldstein delta-subdifferential at a point, together with its sampling
/// error. Sampled-hull certificates are upper bounds by construction: the
/// hull of any gradient sample is contained in the true subdifferential, so
/// the min-norm over the sample can only be too large.
struct StationarityCertificate {
  double delta = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  CertificateMethod method = CertificateMethod::sampled_hull;
  long long n_gradients = 0;
};

struct MinNormPoint {
  Vector point;                      // g* = sum_i coefficients[i] * points[i]
  std::vector<double> coefficients;  // simplex weights over the input list
  double norm = 0.0;
  int iterations = 0;
};

/// Minimum-norm point of conv(points) by Wolfe's method. Terminates when
/// min_i <g*, p_i - g*> >= -tol * (1 + ||g*||^2); throws a convergence error
/// reporting the residual if the iteration cap (default 10 * n * d) is
/// exceeded first.
MinNormPoint min_norm_in_hull(const std::vector<Vector>& points,
                              double tol = 1e-9, long long max_iterations = 0);

/// Samples `samples` gradients at uniform points of the delta-ball around x
/// and returns the min-norm point of their hull. Requires the objective's
/// exact-gradient oracle.
StationarityCertificate goldstein_upper_certificate(
    const StochasticObjective& obj, const Vector& x, double delta,
    long long samples, RandomStream& rng);

/// Estimates the norm of the window-average smoothed gradient
/// (1/M) sum_m grad f_rho(z_m) with `samples_per_point` Monte-Carlo samples
/// per window point. Valid (up to the reported error) as an upper bound on
/// the Goldstein min-norm at the window mean, at radius rho + max distance of
/// a window point from the mean; that radius is recorded in `delta`.
StationarityCertificate window_certificate(const StochasticObjective& obj,
                                           const std::vector<Vector>& window_points,
                                           double rho, long long samples_per_point,
                                           RandomStream& rng);

}  // namespace gfopt
