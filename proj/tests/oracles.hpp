#pragma once
// Reference computations for tests. Everything here is written against
// Boost.Math and direct definitions, not against zcurve internals.

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

inline double norm_pdf(double x, double mean, double sd) {
  return boost::math::pdf(boost::math::normal_distribution<double>(mean, sd), x);
}

inline double norm_sf(double x) {
  return boost::math::cdf(boost::math::complement(boost::math::normal_distribution<double>(), x));
}

inline double norm_q(double p) { return boost::math::quantile(boost::math::normal_distribution<double>(), p); }

/// Step weight defined from p-values directly: the interval index is the
/// number of cutpoints a with p < a, so omegas[0] is the least significant.
struct Weights {
  bool two_sided = true;
  std::vector<double> alphas;  // any order
  std::vector<double> omegas;  // least significant first, last is 1

  double p_value(double z) const { return two_sided ? 2.0 * norm_sf(std::fabs(z)) : norm_sf(z); }

  double operator()(double z) const {
    const double p = p_value(z);
    std::size_t k = 0;
    for (double a : alphas) k += p < a ? 1 : 0;
    return omegas[k];
  }

  /// z values where the weight can jump.
  std::vector<double> breaks() const {
    std::vector<double> out;
    for (double a : alphas) {
      if (two_sided) {
        out.push_back(norm_q(1.0 - a / 2.0));
        out.push_back(-norm_q(1.0 - a / 2.0));
      } else {
        out.push_back(norm_q(1.0 - a));
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

/// Integral of f over [lo, hi], split at the given points.
template <typename F>
double integrate_pieces(F f, double lo, double hi, std::vector<double> cuts, double tol = 1e-13, unsigned depth = 20) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = std::clamp(cuts[i], lo, hi);
    const double b = std::clamp(cuts[i + 1], lo, hi);
    if (b <= a) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, depth, tol);
  }
  return total;
}

/// Expected weight of Y ~ Normal(mu, tau^2 + se^2) with w applied to Y / se.
inline double selection_integral(double mu, double tau, double se, const Weights& w) {
  const double sd = std::sqrt(tau * tau + se * se);
  std::vector<double> cuts;
  for (double z : w.breaks()) cuts.push_back(z * se);
  auto f = [&](double y) { return norm_pdf(y, mu, sd) * w(y / se); };
  // Mass beyond 12 sd is below 1e-32.
  return integrate_pieces(f, mu - 12.0 * sd, mu + 12.0 * sd, cuts, 1e-12, 12);
}

/// Random weight configuration with 1 to 3 cutpoints from a fixed menu.
inline Weights random_weights(std::mt19937_64& rng) {
  static const std::vector<double> menu{0.005, 0.01, 0.025, 0.05, 0.10, 0.20, 0.50};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Weights w;
  w.two_sided = u(rng) < 0.5;
  auto pool = menu;
  std::shuffle(pool.begin(), pool.end(), rng);
  const std::size_t count = 1 + static_cast<std::size_t>(u(rng) * 3.0);
  w.alphas.assign(pool.begin(), pool.begin() + static_cast<long>(count));
  std::vector<double> inc(count + 1);
  double total = 0.0;
  for (double& x : inc) {
    x = -std::log(u(rng));
    total += x;
  }
  double acc = 0.0;
  for (double x : inc) {
    acc += x / total;
    w.omegas.push_back(acc);
  }
  w.omegas.back() = 1.0;
  return w;
}

/// log of the Normal(0, D + s^2 11') density of y at mean m: the marginal
/// likelihood of a common-mean model with mu ~ Normal(m, s^2).
inline double fixed_effect_log_marginal(const std::vector<double>& y, const std::vector<double>& se, double m,
                                        double s) {
  // Sherman-Morrison on D + s^2 11'.
  double sum_inv = 0.0;
  double sum_r = 0.0;
  double sum_rr = 0.0;
  double log_det_d = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double v = se[i] * se[i];
    const double r = y[i] - m;
    sum_inv += 1.0 / v;
    sum_r += r / v;
    sum_rr += r * r / v;
    log_det_d += std::log(v);
  }
  const double denom = 1.0 + s * s * sum_inv;
  const double quad = sum_rr - s * s * sum_r * sum_r / denom;
  const double log_det = log_det_d + std::log(denom);
  const double n = static_cast<double>(y.size());
  return -0.5 * (n * std::log(2.0 * M_PI) + log_det + quad);
}

/// Posterior mean and variance of mu for the same model.
inline std::pair<double, double> fixed_effect_posterior(const std::vector<double>& y, const std::vector<double>& se,
                                                        double m, double s) {
  double precision = 1.0 / (s * s);
  double weighted = m / (s * s);
  for (std::size_t i = 0; i < y.size(); ++i) {
    precision += 1.0 / (se[i] * se[i]);
    weighted += y[i] / (se[i] * se[i]);
  }
  return {weighted / precision, 1.0 / precision};
}

/// Soric bound written out directly.
inline double soric_fdr(double edr, double alpha = 0.05) {
  return std::min(1.0, (1.0 / edr - 1.0) * alpha / (1.0 - alpha));
}

}  // namespace oracle
