#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "zcurve/types.hpp"

namespace zcurve {

/// Absolute publication probability per p-interval. Unlike a
/// WeightFunction, probabilities may be 0 and need not reach 1.
struct Survival {
  Cutpoints cuts{Sidedness::one_sided, {}};
  /// One per interval, least significant first.
  std::vector<double> probabilities{1.0};

  static Survival none();
  /// 1 for one-sided p < .05, 0.05 otherwise.
  static Survival moderate();

  void validate() const;
  double operator()(double z) const;
};

struct SimConfig {
  int k = 300;
  double d = 0.3;
  double tau = 0.15;
  /// Total sample size drawn uniformly from {n_min, ..., n_max} and split
  /// between two groups.
  int n_min = 10;
  int n_max = 60;
  Survival survival = Survival::none();
  std::uint64_t seed = 1;
  std::size_t max_candidates = 1'000'000;
  std::string label = "simulation";

  void validate() const;
};

struct Simulation {
  Dataset data;
  std::size_t generated = 0;
  SimConfig config;
};

/// Generates candidate studies until k survive selection. Throws
/// NumericalError once max_candidates are used up.
Simulation simulate_studies(const SimConfig& cfg);

/// Standard error of Cohen's d for groups of sizes n1 and n2:
/// sqrt(1/n1 + 1/n2 + d^2 / (4 (n1 + n2))), i.e. 2/n + d^2/(8n) for equal n.
double cohens_d_se(double d, int n1, int n2);

nlohmann::json provenance_json(const Simulation& sim);

}  // namespace zcurve
