#include "zcurve/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "zcurve/random.hpp"

namespace zcurve {

Survival Survival::none() { return Survival{}; }

Survival Survival::moderate() { return Survival{Cutpoints::make(Sidedness::one_sided, {0.05}), {0.05, 1.0}}; }

void Survival::validate() const {
  std::vector<std::string> issues;
  if (probabilities.size() != cuts.intervals()) {
    issues.push_back("survival needs one probability per p-interval");
  }
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) issues.push_back("survival probabilities must lie in [0,1]");
  }
  if (std::all_of(probabilities.begin(), probabilities.end(), [](double p) { return p == 0.0; })) {
    issues.push_back("at least one survival probability must be positive");
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

double Survival::operator()(double z) const {
  // The interval lookup only depends on the cutpoints.
  const WeightFunction shape(cuts, std::vector<double>(cuts.intervals(), 1.0));
  return probabilities[shape.interval_of(z)];
}

void SimConfig::validate() const {
  std::vector<std::string> issues;
  if (k < 1) issues.emplace_back("k must be >= 1");
  if (!std::isfinite(d)) issues.emplace_back("d must be finite");
  if (!(tau >= 0.0) || !std::isfinite(tau)) issues.emplace_back("tau must be >= 0");
  if (n_min < 4 || n_max < n_min) issues.emplace_back("sample sizes need 4 <= n_min <= n_max");
  if (max_candidates < static_cast<std::size_t>(std::max(k, 1))) issues.emplace_back("max_candidates must be >= k");
  try {
    survival.validate();
  } catch (const ValidationError& e) {
    issues.insert(issues.end(), e.issues().begin(), e.issues().end());
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

double cohens_d_se(double d, int n1, int n2) {
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return std::sqrt((a + b) / (a * b) + d * d / (4.0 * (a + b)));
}

Simulation simulate_studies(const SimConfig& cfg) {
  cfg.validate();
  Engine rng(mix_seed(cfg.seed, 0));
  const WeightFunction shape(cfg.survival.cuts, std::vector<double>(cfg.survival.cuts.intervals(), 1.0));
  const auto span = static_cast<std::uint64_t>(cfg.n_max - cfg.n_min + 1);

  Simulation sim;
  sim.config = cfg;
  sim.data.label = cfg.label;
  sim.data.studies.reserve(static_cast<std::size_t>(cfg.k));
  while (sim.data.size() < static_cast<std::size_t>(cfg.k)) {
    if (sim.generated >= cfg.max_candidates) {
      throw NumericalError("survival too low: " + std::to_string(sim.generated) + " candidates gave only " +
                           std::to_string(sim.data.size()) + " of " + std::to_string(cfg.k) + " studies");
    }
    ++sim.generated;
    const double theta = cfg.d + cfg.tau * standard_normal(rng);
    const int total = cfg.n_min + static_cast<int>(uniform_index(rng, span));
    const int n1 = total / 2;
    const int n2 = total - n1;
    const double d_obs = theta + cohens_d_se(theta, n1, n2) * standard_normal(rng);
    const double se = cohens_d_se(d_obs, n1, n2);
    const double keep = cfg.survival.probabilities[shape.interval_of(d_obs / se)];
    // Always consume the uniform so the stream does not depend on keep.
    const double u = uniform01(rng);
    if (u < keep) sim.data.studies.emplace_back(d_obs, se);
  }
  return sim;
}

nlohmann::json provenance_json(const Simulation& sim) {
  const auto& c = sim.config;
  nlohmann::json j;
  j["label"] = c.label;
  j["seed"] = c.seed;
  j["k"] = c.k;
  j["d"] = c.d;
  j["tau"] = c.tau;
  j["n_total"] = {c.n_min, c.n_max};
  j["survival"] = {{"side", to_string(c.survival.cuts.side)},
                   {"alphas", c.survival.cuts.alphas},
                   {"probabilities", c.survival.probabilities}};
  j["generated"] = sim.generated;
  j["retained"] = sim.data.size();
  return j;
}

}  // namespace zcurve
