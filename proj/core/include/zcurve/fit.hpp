#pragma once

#include <string>
#include <vector>

#include "zcurve/evidence.hpp"
#include "zcurve/mcmc.hpp"
#include "zcurve/predictive.hpp"
#include "zcurve/types.hpp"

namespace zcurve {

struct FitConfig {
  /// sampler.seed is the master seed; sampler.threads is ignored.
  SamplerConfig sampler;
  QuadratureOptions quadrature;
  ImportanceOptions importance;
  int direction = 1;
  /// Size of the resampled model-averaged ensembles.
  std::size_t ensemble_draws = 10000;
  /// Budget of stored draws pooled over all models; 0 keeps every draw.
  std::size_t max_stored_draws = 10000;
  /// Metrics on the full ensemble instead of the bias-adjusted models.
  bool full_ensemble_metrics = false;
  MetricOptions metrics;
  /// Parallel workers; results do not depend on it.
  int threads = 1;

  void validate() const;
};

struct ModelFit {
  ModelSpec spec;
  PosteriorDraws draws;
  /// Rows in the sampler output before thinning.
  std::size_t sampled_rows = 0;
  std::vector<Interval> summaries;
  EvidenceEstimate evidence;
  double posterior_prob = 0.0;
};

struct FitResult {
  static constexpr int schema_version = 1;

  std::string data_label;
  std::size_t studies = 0;
  FitConfig config;
  std::vector<ModelFit> models;
  InclusionBayesFactor bf_effect;
  InclusionBayesFactor bf_heterogeneity;
  InclusionBayesFactor bf_bias;
  Interval mu;
  Interval tau;
  BiasMetrics metrics;
  /// "bias" or "full".
  std::string metrics_ensemble = "bias";
  std::vector<std::string> warnings;

  ModelSpace space() const;
  std::vector<double> posterior_probs() const;
  std::vector<PosteriorDraws> draws() const;
};

/// Seeds of the derived random streams.
std::uint64_t model_seed(std::uint64_t master, std::size_t model);
std::uint64_t ensemble_seed(std::uint64_t master);
std::uint64_t metrics_seed(std::uint64_t master);

/// Fits every model (in parallel), estimates evidences, and averages.
FitResult fit_ensemble(const ModelSpace& space, const Dataset& data, const FitConfig& cfg);

/// Evenly spaced subset of at most `keep` rows (all rows when keep == 0).
PosteriorDraws thin(const PosteriorDraws& draws, std::size_t keep);

/// Mixture draws over the models with the given probabilities.
std::vector<ModelDraw> ensemble_draws(const FitResult& fit, std::span<const double> probs, std::size_t count,
                                      std::uint64_t seed);

}  // namespace zcurve
