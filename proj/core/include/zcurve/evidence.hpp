#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "zcurve/quadrature.hpp"
#include "zcurve/target.hpp"
#include "zcurve/types.hpp"

namespace zcurve {

enum class Component { effect, heterogeneity, bias };

std::string to_string(Component component);

/// Averaged ensemble of models with prior model probabilities.
struct ModelSpace {
  std::vector<ModelSpec> specs;

  /// Prior probabilities sum to 1 (1e-12), each spec valid, and both sides
  /// of every component represented.
  void validate() const;
  std::size_t size() const noexcept { return specs.size(); }

  static bool has(const ModelSpec& spec, Component component) noexcept;
  /// Prior probability of models including the component.
  double prior_inclusion(Component component) const noexcept;
};

/// Effect {spike 0, Normal(0,1)} x heterogeneity {spike 0, InvGamma(1, 0.15)}
/// x bias {none, six selection models, PET, PEESE}: 36 models.
ModelSpace default_model_space();

enum class EvidenceMethod { exact, quadrature, importance };

std::string to_string(EvidenceMethod method);

struct EvidenceEstimate {
  double log_ml = 0.0;
  /// Quadrature error bound or Monte Carlo standard error (log scale).
  double error = 0.0;
  EvidenceMethod method = EvidenceMethod::exact;
  std::size_t evaluations = 0;
  /// Importance sampling: effective sample size / number of samples.
  double ess_fraction = 1.0;
  std::vector<std::string> warnings;
};

struct QuadratureOptions {
  /// Above this dimension the call is rejected. Nested Gauss-Kronrod is
  /// used up to 2 dimensions and Genz-Malik cubature beyond.
  int max_dimension = 2;
  quadrature::Tolerance tolerance{0.0, 1e-8};
  quadrature::Tolerance cubature_tolerance{0.0, 1e-4};
  std::size_t max_evaluations = 4'000'000;
};

/// Integrates likelihood x prior over the unconstrained parameter space,
/// whitened at the posterior mode and compactified onto the unit cube.
/// Throws NumericalError (naming the last two estimates) on non-convergence.
EvidenceEstimate log_marginal_quadrature(const PosteriorTarget& target,
                                         const QuadratureOptions& options = {});

struct ImportanceOptions {
  double df = 5.0;
  /// 0 uses as many proposals as there are posterior draws.
  std::size_t samples = 0;
  std::uint64_t seed = 1;
  double warn_fraction = 0.05;
  double fail_fraction = 0.005;
};

/// Importance sampling with a multivariate Student-t proposal moment-matched
/// to the posterior draws on the unconstrained scale.
EvidenceEstimate log_marginal_importance(const PosteriorTarget& target, const PosteriorDraws& draws,
                                         const ImportanceOptions& options = {});

/// Quadrature for <= 2 free parameters, importance sampling otherwise.
EvidenceEstimate log_marginal(const PosteriorTarget& target, const PosteriorDraws& draws,
                              const ImportanceOptions& importance = {},
                              const QuadratureOptions& quadrature = {});

/// Posterior model probabilities via log-sum-exp. Throws NumericalError if
/// no model has finite evidence and positive prior.
std::vector<double> posterior_model_probs(const ModelSpace& space, std::span<const double> log_ml);

struct InclusionBayesFactor {
  enum class Flag { finite, infinite, zero };
  double value = 1.0;
  Flag flag = Flag::finite;
  double prior = 0.5;
  double posterior = 0.5;
};

/// Posterior inclusion odds over prior inclusion odds.
InclusionBayesFactor inclusion_bf(const ModelSpace& space, std::span<const double> posterior,
                                  Component component);

/// Model probabilities renormalized over the models that include the
/// component (all zero if none has mass).
std::vector<double> conditional_probs(const ModelSpace& space, std::span<const double> posterior,
                                      Component component);

struct ModelDraw {
  std::size_t model = 0;
  Theta theta;
};

/// Resamples `count` draws from the probability-weighted mixture of model
/// posteriors. Spike parameters carry their exact values.
std::vector<ModelDraw> model_averaged_draws(const ModelSpace& space,
                                            std::span<const PosteriorDraws> fits,
                                            std::span<const double> probs, std::size_t count,
                                            std::uint64_t seed);

}  // namespace zcurve
