#pragma once

#include <span>
#include <vector>

#include "zcurve/types.hpp"

namespace zcurve {

/// Mean and sd of the marginal per-study effect distribution.
struct NormalParams {
  double mean = 0.0;
  double sd = 1.0;

  /// Throws ValidationError unless sd is finite and > 0.
  static NormalParams make(double mean, double sd);
};

/// Study-level mean: mu, mu + beta*se (PET) or mu + beta*se^2 (PEESE).
double mean_structure(BiasKind bias, double mu, double beta, double se) noexcept;

/// Marginal Normal(mean_structure, tau^2 + se^2) for one study.
NormalParams marginal(BiasKind bias, const Theta& theta, double se) noexcept;

/// log Normal(y | mu, tau^2 + se^2). Throws ValidationError on se <= 0 or
/// tau < 0.
double re_log_density(double y, double se, double mu, double tau);

/// Weight of the interval containing z. One-sided weighting uses the upper
/// tail; callers flip z for a negative expected direction.
double weight_at(const WeightFunction& wf, double z) noexcept;

/// Expected weight of X ~ Normal(mean, sd^2) under wf applied to X / se.
/// Closed form via the normal CDF.
double selection_integral(const NormalParams& x, const WeightFunction& wf, double se) noexcept;

/// I(mu, tau, omega, se) for the random-effects marginal. `direction` = -1
/// mirrors the selection onto the lower tail.
double selection_integral_I(double mu, double tau, const WeightFunction& wf, double se,
                            int direction = 1);

/// log[Normal(y | mu, tau^2 + se^2) w(y/se) / I]. Throws NumericalError when
/// I underflows below 1e-300.
double weighted_normal_log_density(double y, double se, double mu, double tau,
                                   const WeightFunction& wf, int direction = 1);

/// Sum of the component log-priors at theta. Spikes contribute 0 when the
/// parameter equals the spike value. Out-of-support values give -infinity.
double log_prior(const ModelSpec& spec, const Theta& theta);

/// z thresholds implied by the cutpoints: two-sided alpha gives
/// +-quantile(1 - alpha/2), one-sided gives quantile(1 - alpha). Ascending,
/// deduplicated.
std::vector<double> z_cutpoints(const WeightFunction& wf);
std::vector<double> z_cutpoints(const Cutpoints& cuts);

/// Data log-likelihood of one ModelSpec with study-level quantities
/// precomputed. Returns -infinity for parameters outside the support or
/// when the selection normalizer underflows.
class ModelLikelihood {
 public:
  ModelLikelihood(const ModelSpec& spec, const Dataset& data, int direction = 1);

  double operator()(const Theta& theta) const;

  std::size_t studies() const noexcept { return y_.size(); }
  const ModelSpec& spec() const noexcept { return spec_; }

 private:
  double selection_log_normalizer(const Theta& theta, double se, double se2) const;

  ModelSpec spec_;
  int direction_;
  std::vector<double> y_;
  std::vector<double> se_;
  std::vector<double> se2_;
  // Selection only: study counts per weight interval and z thresholds.
  std::vector<double> interval_counts_;
  std::vector<double> thresholds_;
  Sidedness side_ = Sidedness::two_sided;
};

}  // namespace zcurve
