#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace zcurve::quadrature {

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
  /// Estimate before the last refinement step.
  double previous = 0.0;
};

struct Tolerance {
  double absolute = 0.0;
  double relative = 1e-8;
};

/// Globally adaptive Gauss-Kronrod (7/15) on a finite interval: the
/// subinterval with the largest error estimate is bisected until
/// error <= max(absolute, relative*|value|) or the interval budget runs out.
Result gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                     Tolerance tol = {}, std::size_t max_intervals = 2000);

/// Globally adaptive Genz-Malik (degree 7, embedded degree 5) cubature over
/// a hyper-rectangle, for 2 <= dim <= ~10.
Result genz_malik(const std::function<double(std::span<const double>)>& f,
                  std::span<const double> lower, std::span<const double> upper,
                  Tolerance tol = {}, std::size_t max_evaluations = 5'000'000);

}  // namespace zcurve::quadrature
