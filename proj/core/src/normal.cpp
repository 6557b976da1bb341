#include "zcurve/normal.hpp"

#include <cmath>
#include <limits>

namespace zcurve::normal {

namespace {

constexpr double inv_sqrt2 = 0.707106781186547524400844362105;

}  // namespace

double pdf(double x) noexcept { return inv_sqrt_2pi * std::exp(-0.5 * x * x); }

double log_pdf(double x) noexcept { return -0.5 * x * x - log_sqrt_2pi; }

double log_pdf(double x, double mean, double sd) noexcept {
  const double u = (x - mean) / sd;
  return -0.5 * u * u - log_sqrt_2pi - std::log(sd);
}

// erf near the centre, erfc in the tails (cephes ndtr layout).
double cdf(double x) noexcept {
  if (std::isnan(x)) return x;
  const double t = x * inv_sqrt2;
  const double a = std::fabs(t);
  if (a < inv_sqrt2) return 0.5 + 0.5 * std::erf(t);
  const double tail = 0.5 * std::erfc(a);
  return t > 0.0 ? 1.0 - tail : tail;
}

double sf(double x) noexcept { return cdf(-x); }

double interval(double a, double b) noexcept {
  if (!(a < b)) return 0.0;
  if (a >= 0.0) return sf(a) - sf(b);
  if (b <= 0.0) return cdf(b) - cdf(a);
  return 1.0 - cdf(a) - sf(b);
}

// Acklam's rational approximation (relative error ~1.15e-9) followed by
// one Newton step on cdf(x) - p.
double quantile(double p) noexcept {
  if (std::isnan(p) || p < 0.0 || p > 1.0) return std::numeric_limits<double>::quiet_NaN();
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Newton polish; the residual is taken on the smaller tail.
  const double density = pdf(x);
  if (density > 0.0) {
    const double residual = p < 0.5 ? cdf(x) - p : (1.0 - p) - sf(x);
    x -= residual / density;
  }
  return x;
}

}  // namespace zcurve::normal
