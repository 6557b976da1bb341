#include <benchmark/benchmark.h>

#include "zcurve/densities.hpp"
#include "zcurve/evidence.hpp"
#include "zcurve/mcmc.hpp"
#include "zcurve/plot.hpp"
#include "zcurve/predictive.hpp"
#include "zcurve/simulate.hpp"

using namespace zcurve;

namespace {

const Dataset& data300() {
  static const Dataset d = [] {
    SimConfig cfg;
    cfg.survival = Survival::moderate();
    return simulate_studies(cfg).data;
  }();
  return d;
}

const ModelSpec& spec(const std::string& label) {
  static const ModelSpace space = default_model_space();
  for (const auto& s : space.specs) {
    if (s.label == label) return s;
  }
  throw Error("no model " + label);
}

}  // namespace

static void BM_SelectionIntegral(benchmark::State& state) {
  const WeightFunction wf(Sidedness::one_sided, {0.05, 0.10, 0.50}, {0.2, 0.4, 0.7, 1.0});
  double se = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(selection_integral_I(0.3, 0.15, wf, se));
    se = se < 0.5 ? se + 1e-4 : 0.1;
  }
}
BENCHMARK(BM_SelectionIntegral);

static void BM_LogLikelihood(benchmark::State& state) {
  const auto& s = spec(state.range(0) ? "mu.tau.S4" : "mu.tau.none");
  const ModelLikelihood ll(s, data300());
  Theta theta{0.3, 0.15, 0.0, {}};
  if (s.bias == BiasKind::selection) theta.omega = {0.2, 0.4, 0.7, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(ll(theta));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(data300().size()));
}
BENCHMARK(BM_LogLikelihood)->Arg(0)->Arg(1);

static void BM_SampleSelectionModel(benchmark::State& state) {
  SamplerConfig cfg;
  cfg.chains = 1;
  cfg.warmup = 200;
  cfg.iterations = 500;
  for (auto _ : state) benchmark::DoNotOptimize(sample_posterior(spec("mu.tau.S1"), data300(), cfg));
}
BENCHMARK(BM_SampleSelectionModel)->Unit(benchmark::kMillisecond);

static void BM_QuadratureEvidence(benchmark::State& state) {
  const PosteriorTarget target(spec("mu.tau.none"), data300());
  for (auto _ : state) benchmark::DoNotOptimize(log_marginal_quadrature(target));
}
BENCHMARK(BM_QuadratureEvidence)->Unit(benchmark::kMillisecond);

static void BM_FittedDensityMatrix(benchmark::State& state) {
  PredictiveDraw draw;
  draw.bias = BiasKind::selection;
  draw.mu = 0.3;
  draw.tau = 0.15;
  draw.weights = WeightFunction(Sidedness::two_sided, {0.05}, {0.3, 1.0});
  const std::vector<PredictiveDraw> draws(static_cast<std::size_t>(state.range(0)), draw);
  const auto grid = GridConfig{}.grid();
  for (auto _ : state) benchmark::DoNotOptimize(fitted_density_matrix(draws, data300(), grid));
}
BENCHMARK(BM_FittedDensityMatrix)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_RenderPlot(benchmark::State& state) {
  const auto hist = histogram_bins(data300());
  PlotCurve curve;
  curve.name = "re";
  curve.grid = GridConfig{}.grid();
  curve.band.mean.assign(curve.grid.size(), 0.1);
  curve.band.lower.assign(curve.grid.size(), 0.05);
  curve.band.upper.assign(curve.grid.size(), 0.15);
  const std::vector<PlotCurve> curves{curve};
  for (auto _ : state) benchmark::DoNotOptimize(render_zcurve(hist, curves));
}
BENCHMARK(BM_RenderPlot)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
