#include "zcurve/densities.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "zcurve/normal.hpp"

namespace zcurve {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// Probability that X ~ Normal(mean, sd^2) falls in [lo, hi).
double mass(double lo, double hi, double mean, double sd) noexcept {
  return normal::interval((lo - mean) / sd, (hi - mean) / sd);
}

// Expected step weight of X / se given ascending z thresholds and weights.
// Probabilities are accumulated from the most significant interval down
// so the dominant term is added last.
double expected_weight(double mean, double sd, double se, Sidedness side,
                       std::span<const double> thresholds,
                       std::span<const double> omegas) noexcept {
  const std::size_t k = thresholds.size();
  double total = 0.0;
  for (std::size_t j = 0; j <= k; ++j) {
    const double lo = j == 0 ? (side == Sidedness::two_sided ? 0.0 : -inf) : se * thresholds[j - 1];
    const double hi = j == k ? inf : se * thresholds[j];
    double p = mass(lo, hi, mean, sd);
    if (side == Sidedness::two_sided) p += mass(-hi, -lo, mean, sd);
    total += omegas[j] * p;
  }
  return total;
}

}  // namespace

NormalParams NormalParams::make(double mean, double sd) {
  if (!std::isfinite(sd) || !(sd > 0.0)) throw ValidationError("normal sd must be finite and > 0");
  return NormalParams{mean, sd};
}

double mean_structure(BiasKind bias, double mu, double beta, double se) noexcept {
  switch (bias) {
    case BiasKind::pet: return mu + beta * se;
    case BiasKind::peese: return mu + beta * se * se;
    default: return mu;
  }
}

NormalParams marginal(BiasKind bias, const Theta& theta, double se) noexcept {
  return NormalParams{mean_structure(bias, theta.mu, theta.beta, se),
                      std::sqrt(theta.tau * theta.tau + se * se)};
}

double re_log_density(double y, double se, double mu, double tau) {
  if (!(se > 0.0) || !std::isfinite(se)) throw ValidationError("se must be finite and > 0");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be finite and >= 0");
  return normal::log_pdf(y, mu, std::sqrt(tau * tau + se * se));
}

double weight_at(const WeightFunction& wf, double z) noexcept { return wf(z); }

double selection_integral(const NormalParams& x, const WeightFunction& wf, double se) noexcept {
  if (wf.is_constant()) return 1.0;
  return expected_weight(x.mean, x.sd, se, wf.side(), wf.z_thresholds(), wf.omegas());
}

double selection_integral_I(double mu, double tau, const WeightFunction& wf, double se,
                            int direction) {
  if (!(se > 0.0) || !std::isfinite(se)) throw ValidationError("se must be finite and > 0");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be finite and >= 0");
  return selection_integral(NormalParams{direction * mu, std::sqrt(tau * tau + se * se)}, wf, se);
}

double weighted_normal_log_density(double y, double se, double mu, double tau,
                                   const WeightFunction& wf, int direction) {
  const double base = re_log_density(y, se, mu, tau);
  if (wf.is_constant()) return base;
  const double integral = selection_integral_I(mu, tau, wf, se, direction);
  if (!(integral >= 1e-300)) {
    std::ostringstream msg;
    msg << "selection normalizer underflow (I=" << integral << ") at mu=" << mu << ", tau=" << tau
        << ", se=" << se;
    throw NumericalError(msg.str());
  }
  return base + std::log(wf(direction * y / se)) - std::log(integral);
}

double log_prior(const ModelSpec& spec, const Theta& theta) {
  double lp = spec.effect.log_density(theta.mu) + spec.heterogeneity.log_density(theta.tau);
  if (spec.bias == BiasKind::pet || spec.bias == BiasKind::peese) {
    lp += spec.slope.log_density(theta.beta);
  }
  if (spec.bias == BiasKind::selection) {
    const auto& omega = theta.omega;
    const auto& alpha = spec.omega_concentration;
    if (omega.size() != alpha.size() || omega.back() != 1.0) return -inf;
    double sum_alpha = 0.0;
    double previous = 0.0;
    for (std::size_t j = 0; j < omega.size(); ++j) {
      const double increment = omega[j] - previous;
      previous = omega[j];
      if (increment < 0.0) return -inf;
      sum_alpha += alpha[j];
      lp -= std::lgamma(alpha[j]);
      if (alpha[j] != 1.0) {
        if (increment == 0.0) return alpha[j] > 1.0 ? -inf : inf;
        lp += (alpha[j] - 1.0) * std::log(increment);
      }
    }
    lp += std::lgamma(sum_alpha);
  }
  return std::isnan(lp) ? -inf : lp;
}

std::vector<double> z_cutpoints(const Cutpoints& cuts) {
  std::vector<double> out;
  for (double a : cuts.alphas) {
    if (cuts.side == Sidedness::two_sided) {
      const double c = -normal::quantile(a / 2.0);
      out.push_back(-c);
      out.push_back(c);
    } else {
      out.push_back(-normal::quantile(a));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  // quantile(0.5) can come back as -0.0.
  for (double& c : out) c = c == 0.0 ? 0.0 : c;
  return out;
}

std::vector<double> z_cutpoints(const WeightFunction& wf) { return z_cutpoints(wf.cutpoints()); }

// ---------------------------------------------------------------------------

ModelLikelihood::ModelLikelihood(const ModelSpec& spec, const Dataset& data, int direction)
    : spec_(spec), direction_(direction >= 0 ? 1 : -1) {
  spec_.validate();
  validate_dataset(data);
  y_.reserve(data.size());
  for (const auto& s : data.studies) {
    y_.push_back(s.y());
    se_.push_back(s.se());
    se2_.push_back(s.se() * s.se());
  }
  if (spec_.bias == BiasKind::selection) {
    // Interval membership depends only on the observed z, so the weight
    // term reduces to sum_j n_j log(omega_j).
    const std::vector<double> omegas(spec_.selection->intervals(), 1.0);
    const WeightFunction shape(*spec_.selection, omegas);
    thresholds_ = shape.z_thresholds();
    side_ = shape.side();
    interval_counts_.assign(omegas.size(), 0.0);
    for (const auto& s : data.studies) interval_counts_[shape.interval_of(direction_ * s.z())] += 1.0;
  }
}

double ModelLikelihood::selection_log_normalizer(const Theta& theta, double se, double se2) const {
  const double sd = std::sqrt(theta.tau * theta.tau + se2);
  const double integral =
      expected_weight(direction_ * theta.mu, sd, se, side_, thresholds_, theta.omega);
  return std::log(integral);
}

double ModelLikelihood::operator()(const Theta& theta) const {
  if (!(theta.tau >= 0.0) || !std::isfinite(theta.tau) || !std::isfinite(theta.mu)) return -inf;
  const double tau2 = theta.tau * theta.tau;
  double ll = 0.0;
  switch (spec_.bias) {
    case BiasKind::none:
    case BiasKind::pet:
    case BiasKind::peese: {
      if (!std::isfinite(theta.beta)) return -inf;
      for (std::size_t i = 0; i < y_.size(); ++i) {
        const double v = tau2 + se2_[i];
        const double r = y_[i] - mean_structure(spec_.bias, theta.mu, theta.beta, se_[i]);
        ll += -0.5 * (r * r / v + std::log(v));
      }
      ll -= static_cast<double>(y_.size()) * normal::log_sqrt_2pi;
      break;
    }
    case BiasKind::selection: {
      if (theta.omega.size() != interval_counts_.size()) return -inf;
      for (std::size_t j = 0; j < theta.omega.size(); ++j) {
        if (!(theta.omega[j] > 0.0)) return -inf;
        if (interval_counts_[j] > 0.0) ll += interval_counts_[j] * std::log(theta.omega[j]);
      }
      for (std::size_t i = 0; i < y_.size(); ++i) {
        const double v = tau2 + se2_[i];
        const double r = y_[i] - theta.mu;
        ll += -0.5 * (r * r / v + std::log(v)) - selection_log_normalizer(theta, se_[i], se2_[i]);
      }
      ll -= static_cast<double>(y_.size()) * normal::log_sqrt_2pi;
      break;
    }
  }
  return std::isnan(ll) ? -inf : ll;
}

}  // namespace zcurve
