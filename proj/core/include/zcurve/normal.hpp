#pragma once

namespace zcurve::normal {

inline constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934;
inline constexpr double log_sqrt_2pi = 0.918938533204672741780329736406;

double pdf(double x) noexcept;
double log_pdf(double x) noexcept;
/// log density of Normal(mean, sd) at x.
double log_pdf(double x, double mean, double sd) noexcept;

/// Standard normal CDF.
double cdf(double x) noexcept;
/// Upper tail 1 - cdf(x), accurate for large x.
double sf(double x) noexcept;
/// P(a <= X < b) for standard normal X, computed on the tail that avoids
/// cancellation. Requires a <= b; infinite bounds allowed.
double interval(double a, double b) noexcept;

/// Inverse of cdf on (0, 1). Returns -inf/+inf at 0/1 and NaN outside.
double quantile(double p) noexcept;

}  // namespace zcurve::normal
