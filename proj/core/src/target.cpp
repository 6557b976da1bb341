#include "zcurve/target.hpp"

#include <cmath>

namespace zcurve {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// log(1 + exp(x)) without overflow.
double softplus(double x) noexcept { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Scalar on [lo, hi] from an unconstrained value; returns log-Jacobian.
double bounded_from(double u, double lo, double hi, double& x) noexcept {
  const bool has_lo = std::isfinite(lo);
  const bool has_hi = std::isfinite(hi);
  if (!has_lo && !has_hi) {
    x = u;
    return 0.0;
  }
  if (has_lo && !has_hi) {
    x = lo + std::exp(u);
    return u;
  }
  if (!has_lo) {
    x = hi - std::exp(u);
    return u;
  }
  x = lo + (hi - lo) * logistic(u);
  return std::log(hi - lo) - softplus(-u) - softplus(u);
}

double bounded_to(double x, double lo, double hi) noexcept {
  const bool has_lo = std::isfinite(lo);
  const bool has_hi = std::isfinite(hi);
  if (!has_lo && !has_hi) return x;
  if (has_lo && !has_hi) return std::log(x - lo);
  if (!has_lo) return std::log(hi - x);
  const double p = (x - lo) / (hi - lo);
  return std::log(p) - std::log1p(-p);
}

}  // namespace

PosteriorTarget::PosteriorTarget(const ModelSpec& spec, const Dataset& data, int direction)
    : likelihood_(spec, data, direction), layout_(ParameterLayout::of(spec)) {}

double PosteriorTarget::to_theta(std::span<const double> u, Theta& theta) const {
  const auto& s = spec();
  double log_jac = 0.0;
  theta.mu = s.effect.location;
  theta.tau = s.heterogeneity.location;
  theta.beta = 0.0;
  if (layout_.mu >= 0) log_jac += bounded_from(u[layout_.mu], s.effect.lower, s.effect.upper, theta.mu);
  if (layout_.tau >= 0) {
    log_jac += bounded_from(u[layout_.tau], s.heterogeneity.lower, s.heterogeneity.upper, theta.tau);
  }
  if (layout_.beta >= 0) log_jac += bounded_from(u[layout_.beta], s.slope.lower, s.slope.upper, theta.beta);

  if (s.bias == BiasKind::selection) {
    const int free = layout_.omega_count;
    theta.omega.resize(static_cast<std::size_t>(free) + 1);
    double remaining = 1.0;
    double cumulative = 0.0;
    for (int k = 0; k < free; ++k) {
      const double x = u[layout_.omega_begin + k] - std::log(static_cast<double>(free - k));
      const double z = logistic(x);
      const double increment = remaining * z;
      log_jac += -softplus(-x) - softplus(x) + std::log(remaining);
      remaining -= increment;
      cumulative += increment;
      theta.omega[k] = std::min(cumulative, 1.0);
    }
    theta.omega.back() = 1.0;
  } else {
    theta.omega.clear();
  }
  return log_jac;
}

std::vector<double> PosteriorTarget::to_unconstrained(const Theta& theta) const {
  const auto& s = spec();
  std::vector<double> u(static_cast<std::size_t>(layout_.dimension));
  if (layout_.mu >= 0) u[layout_.mu] = bounded_to(theta.mu, s.effect.lower, s.effect.upper);
  if (layout_.tau >= 0) u[layout_.tau] = bounded_to(theta.tau, s.heterogeneity.lower, s.heterogeneity.upper);
  if (layout_.beta >= 0) u[layout_.beta] = bounded_to(theta.beta, s.slope.lower, s.slope.upper);
  if (s.bias == BiasKind::selection) {
    const int free = layout_.omega_count;
    double remaining = 1.0;
    double previous = 0.0;
    for (int k = 0; k < free; ++k) {
      const double increment = theta.omega[k] - previous;
      previous = theta.omega[k];
      const double z = increment / remaining;
      u[layout_.omega_begin + k] = std::log(z) - std::log1p(-z) + std::log(static_cast<double>(free - k));
      remaining -= increment;
    }
  }
  return u;
}

double PosteriorTarget::log_prior(const Theta& theta) const { return zcurve::log_prior(spec(), theta); }

double PosteriorTarget::log_density(std::span<const double> u, Theta& scratch) const {
  for (double v : u) {
    if (!std::isfinite(v)) return -inf;
  }
  const double log_jac = to_theta(u, scratch);
  const double lp = log_prior(scratch);
  if (!(lp > -inf)) return -inf;
  const double ll = likelihood_(scratch);
  const double total = ll + lp + log_jac;
  return std::isnan(total) ? -inf : total;
}

double PosteriorTarget::log_density(std::span<const double> u) const {
  Theta scratch;
  return log_density(u, scratch);
}

std::vector<double> PosteriorTarget::initial_point() const {
  const auto& s = spec();
  Theta theta;
  theta.mu = s.effect.median();
  theta.tau = s.heterogeneity.median();
  theta.beta = s.slope.is_spike() ? 0.0 : s.slope.median();
  // Equal increments; these sit at stick-breaking coordinate 0.
  const int intervals = layout_.omega_count + 1;
  for (int k = 0; k < layout_.omega_count; ++k) theta.omega.push_back(static_cast<double>(k + 1) / intervals);
  if (layout_.omega_count > 0) theta.omega.push_back(1.0);
  auto u = to_unconstrained(theta);
  for (int k = 0; k < layout_.omega_count; ++k) u[layout_.omega_begin + k] = 0.0;
  return u;
}

std::vector<double> PosteriorTarget::row(const Theta& theta) const {
  return row_from_theta(spec(), layout_, theta);
}

}  // namespace zcurve
