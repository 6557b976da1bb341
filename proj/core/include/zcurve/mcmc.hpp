#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zcurve/target.hpp"
#include "zcurve/types.hpp"

namespace zcurve {

struct SamplerConfig {
  int chains = 4;
  int warmup = 2000;
  int iterations = 5000;  // retained per chain
  std::uint64_t seed = 1;
  double target_acceptance = 0.3;
  /// Step sizes are updated from the acceptance rate of each window of this
  /// many warmup iterations.
  int adaptation_window = 20;
  /// sd of the per-chain jitter added to the prior-median start.
  double init_jitter = 0.5;
  int threads = 1;

  void validate() const;
};

/// Adaptive component-wise random-walk Metropolis. Step sizes adapt during
/// warmup only. Chains use independent streams derived from cfg.seed, so
/// results are identical for any thread count.
PosteriorDraws sample_posterior(const PosteriorTarget& target, const SamplerConfig& cfg);
PosteriorDraws sample_posterior(const ModelSpec& spec, const Dataset& data, const SamplerConfig& cfg,
                                int direction = 1);

/// Split-chain potential scale reduction. Needs >= 2 chains with >= 4 draws
/// each; zero within- and between-chain variance returns 1.
double rhat(std::span<const std::vector<double>> chains);

/// Effective sample size of one sequence via Geyer's initial positive
/// sequence. Needs >= 8 draws; a constant sequence returns 1.
double ess(std::span<const double> draws);

/// Sum of per-chain effective sample sizes.
double ess(std::span<const std::vector<double>> chains);

}  // namespace zcurve
