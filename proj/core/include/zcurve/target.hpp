#pragma once

#include <span>
#include <vector>

#include "zcurve/densities.hpp"
#include "zcurve/types.hpp"

namespace zcurve {

/// Posterior of one ModelSpec on an unconstrained parameter space.
///
/// Bounded scalars (tau, beta, truncated mu) go through log or logit
/// transforms. Selection weights are parameterized by their increments,
/// which live on a simplex and are mapped by stick-breaking with logistic
/// transforms. log_density() includes the exact log-Jacobian, so it is the
/// density the sampler and the evidence integrators work with.
class PosteriorTarget {
 public:
  PosteriorTarget(const ModelSpec& spec, const Dataset& data, int direction = 1);

  int dimension() const noexcept { return layout_.dimension; }
  const ParameterLayout& layout() const noexcept { return layout_; }
  const ModelSpec& spec() const noexcept { return likelihood_.spec(); }

  /// Writes theta(u) and returns log|d theta / d u|.
  double to_theta(std::span<const double> u, Theta& theta) const;
  std::vector<double> to_unconstrained(const Theta& theta) const;

  double log_likelihood(const Theta& theta) const { return likelihood_(theta); }
  double log_prior(const Theta& theta) const;

  /// Unnormalized log posterior on the unconstrained scale.
  double log_density(std::span<const double> u, Theta& scratch) const;
  double log_density(std::span<const double> u) const;

  /// Prior medians mapped to the unconstrained scale.
  std::vector<double> initial_point() const;

  /// Free-parameter row (constrained scale) for theta.
  std::vector<double> row(const Theta& theta) const;

 private:
  ModelLikelihood likelihood_;
  ParameterLayout layout_;
};

}  // namespace zcurve
