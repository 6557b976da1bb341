#include "zcurve/fit.hpp"

#include <algorithm>

#include "zcurve/parallel.hpp"
#include "zcurve/random.hpp"

namespace zcurve {

void FitConfig::validate() const {
  sampler.validate();
  std::vector<std::string> issues;
  if (ensemble_draws < 1) issues.emplace_back("ensemble draws must be >= 1");
  if (direction != 1 && direction != -1) issues.emplace_back("direction must be +1 or -1");
  if (!(metrics.alpha > 0.0 && metrics.alpha < 1.0)) issues.emplace_back("alpha must be in (0,1)");
  if (!(metrics.level > 0.0 && metrics.level < 1.0)) issues.emplace_back("interval level must be in (0,1)");
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

ModelSpace FitResult::space() const {
  ModelSpace s;
  for (const auto& m : models) s.specs.push_back(m.spec);
  return s;
}

std::vector<double> FitResult::posterior_probs() const {
  std::vector<double> p;
  for (const auto& m : models) p.push_back(m.posterior_prob);
  return p;
}

std::vector<PosteriorDraws> FitResult::draws() const {
  std::vector<PosteriorDraws> d;
  for (const auto& m : models) d.push_back(m.draws);
  return d;
}

std::uint64_t model_seed(std::uint64_t master, std::size_t model) { return mix_seed(master, 1 + model); }
std::uint64_t ensemble_seed(std::uint64_t master) { return mix_seed(master, 0xE45E); }
std::uint64_t metrics_seed(std::uint64_t master) { return mix_seed(master, 0xB1A5); }

PosteriorDraws thin(const PosteriorDraws& draws, std::size_t keep) {
  if (keep == 0 || draws.rows() <= keep) return draws;
  PosteriorDraws out = draws;
  out.values.clear();
  out.chain_ids.clear();
  const std::size_t n = draws.rows();
  const std::size_t p = draws.parameters();
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t r = i * n / keep;
    const auto row = draws.row(r);
    out.values.insert(out.values.end(), row.begin(), row.begin() + static_cast<long>(p));
    out.chain_ids.push_back(draws.chain_ids[r]);
  }
  return out;
}

std::vector<ModelDraw> ensemble_draws(const FitResult& fit, std::span<const double> probs, std::size_t count,
                                      std::uint64_t seed) {
  const auto space = fit.space();
  const auto draws = fit.draws();
  return model_averaged_draws(space, draws, probs, count, seed);
}

FitResult fit_ensemble(const ModelSpace& space, const Dataset& data, const FitConfig& cfg) {
  space.validate();
  validate_dataset(data);
  cfg.validate();

  FitResult result;
  result.data_label = data.label;
  result.studies = data.size();
  result.config = cfg;
  result.models.resize(space.size());

  const std::uint64_t master = cfg.sampler.seed;
  parallel_for(space.size(), cfg.threads, [&](std::size_t k) {
    const auto& spec = space.specs[k];
    try {
      const PosteriorTarget target(spec, data, cfg.direction);
      SamplerConfig sampler = cfg.sampler;
      sampler.seed = model_seed(master, k);
      sampler.threads = 1;
      ModelFit fit;
      fit.spec = spec;
      fit.draws = sample_posterior(target, sampler);
      fit.sampled_rows = fit.draws.rows();
      ImportanceOptions importance = cfg.importance;
      importance.seed = mix_seed(sampler.seed, 0x15);
      fit.evidence = log_marginal(target, fit.draws, importance, cfg.quadrature);
      for (std::size_t j = 0; j < fit.draws.parameters(); ++j) {
        fit.summaries.push_back(summarize(fit.draws.column(j), cfg.metrics.level));
      }
      result.models[k] = std::move(fit);
    } catch (const ValidationError& e) {
      auto issues = e.issues();
      for (auto& i : issues) i = "model '" + spec.label + "': " + i;
      throw ValidationError(std::move(issues));
    } catch (const NumericalError& e) {
      throw NumericalError("model '" + spec.label + "': " + e.what());
    } catch (const DiagnosticError& e) {
      throw DiagnosticError("model '" + spec.label + "': " + e.what());
    }
  });

  std::vector<double> log_ml;
  for (const auto& m : result.models) log_ml.push_back(m.evidence.log_ml);
  const auto probs = posterior_model_probs(space, log_ml);
  for (std::size_t k = 0; k < probs.size(); ++k) result.models[k].posterior_prob = probs[k];
  result.bf_effect = inclusion_bf(space, probs, Component::effect);
  result.bf_heterogeneity = inclusion_bf(space, probs, Component::heterogeneity);
  result.bf_bias = inclusion_bf(space, probs, Component::bias);

  std::vector<PosteriorDraws> draws;
  for (const auto& m : result.models) draws.push_back(m.draws);
  const auto pooled = model_averaged_draws(space, draws, probs, cfg.ensemble_draws, ensemble_seed(master));
  std::vector<double> mu;
  std::vector<double> tau;
  for (const auto& d : pooled) {
    mu.push_back(d.theta.mu);
    tau.push_back(d.theta.tau);
  }
  result.mu = summarize(mu, cfg.metrics.level);
  result.tau = summarize(tau, cfg.metrics.level);

  auto metric_probs = probs;
  result.metrics_ensemble = "full";
  if (!cfg.full_ensemble_metrics) {
    auto conditional = conditional_probs(space, probs, Component::bias);
    if (std::any_of(conditional.begin(), conditional.end(), [](double p) { return p > 0.0; })) {
      metric_probs = std::move(conditional);
      result.metrics_ensemble = "bias";
    } else {
      result.warnings.emplace_back("no posterior mass on bias-adjusted models; metrics use the full ensemble");
    }
  }
  const auto metric_draws = model_averaged_draws(space, draws, metric_probs, cfg.ensemble_draws, metrics_seed(master));
  const auto predictive = predictive_draws(space, metric_draws, cfg.direction);
  result.metrics = bias_metrics(predictive, data, cfg.metrics, cfg.threads);

  const std::size_t per_model = cfg.max_stored_draws == 0 ? 0 : std::max<std::size_t>(1, cfg.max_stored_draws / space.size());
  for (auto& m : result.models) {
    for (const auto& w : m.draws.warnings) result.warnings.push_back("model '" + m.spec.label + "': " + w);
    for (const auto& w : m.evidence.warnings) result.warnings.push_back("model '" + m.spec.label + "': " + w);
    m.draws = thin(m.draws, per_model);
  }
  return result;
}

}  // namespace zcurve
