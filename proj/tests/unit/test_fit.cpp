#include <doctest.h>

#include <cmath>

#include "zcurve/fit.hpp"
#include "zcurve/fit_io.hpp"
#include "zcurve/model_space_io.hpp"
#include "zcurve/simulate.hpp"

using namespace zcurve;

namespace {

ModelSpace small_space() {
  const auto full = default_model_space();
  ModelSpace space;
  for (const auto& s : full.specs) {
    if (s.label == "mu0.tau0.none" || s.label == "mu.tau.none" || s.label == "mu.tau.S5" ||
        s.label == "mu.tau.PET") {
      space.specs.push_back(s);
    }
  }
  const double total = 0.125 + 0.125 + 1.0 / 96.0 + 1.0 / 32.0;
  for (auto& s : space.specs) s.prior_prob /= total;
  return space;
}

Dataset small_data() {
  SimConfig cfg;
  cfg.k = 30;
  cfg.seed = 17;
  cfg.survival = Survival::moderate();
  return simulate_studies(cfg).data;
}

FitConfig quick_config() {
  FitConfig cfg;
  cfg.sampler.warmup = 300;
  cfg.sampler.iterations = 500;
  cfg.sampler.seed = 3;
  cfg.ensemble_draws = 2000;
  cfg.max_stored_draws = 2000;
  return cfg;
}

}  // namespace

TEST_CASE("ensemble fit basics and thread independence") {
  const auto space = small_space();
  REQUIRE(space.size() == 4);
  const auto data = small_data();
  auto cfg = quick_config();
  const auto a = fit_ensemble(space, data, cfg);
  cfg.threads = 3;
  const auto b = fit_ensemble(space, data, cfg);
  CHECK(write_fit(a) == write_fit(b));

  CHECK(a.studies == 30);
  CHECK(a.models.size() == 4);
  double total = 0.0;
  for (const auto& m : a.models) {
    total += m.posterior_prob;
    CHECK(m.draws.rows() <= 500);
    CHECK(m.sampled_rows == (m.spec.has_effect() ? 2000u : 0u));
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK(a.metrics.edr.lower <= a.metrics.edr.median);
  CHECK(a.metrics.edr.median <= a.metrics.edr.upper);
  CHECK(a.metrics_ensemble == "bias");
  CHECK(a.models[0].evidence.method == EvidenceMethod::exact);
}

TEST_CASE("fit JSON round trip") {
  const auto fit = fit_ensemble(small_space(), small_data(), quick_config());
  const auto text = write_fit(fit);
  const auto back = fit_from_json(nlohmann::json::parse(text));
  CHECK(write_fit(back) == text);
  CHECK(back.space().specs == fit.space().specs);
  CHECK(back.posterior_probs() == fit.posterior_probs());

  auto j = nlohmann::json::parse(text);
  j["schema_version"] = 2;
  try {
    fit_from_json(j);
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
}

TEST_CASE("model space JSON round trip") {
  const auto space = default_model_space();
  const auto text = write_model_space(space);
  const auto back = model_space_from_json(nlohmann::json::parse(text));
  CHECK(back.specs == space.specs);
  auto j = nlohmann::json::parse(text);
  j["models"][0]["prior_prob"] = 0.5;
  CHECK_THROWS_AS(model_space_from_json(j), ValidationError);
  CHECK_THROWS_AS(read_model_space("/nonexistent/space.json"), Error);
}

TEST_CASE("seeds of derived streams differ") {
  CHECK(model_seed(1, 0) != model_seed(1, 1));
  CHECK(model_seed(1, 0) != model_seed(2, 0));
  CHECK(ensemble_seed(1) != metrics_seed(1));
}

TEST_CASE("thinning keeps evenly spaced rows") {
  PosteriorDraws d;
  d.names = {"mu"};
  for (int i = 0; i < 100; ++i) {
    d.values.push_back(i);
    d.chain_ids.push_back(i / 50);
  }
  const auto t = thin(d, 10);
  CHECK(t.rows() == 10);
  CHECK(t.values.front() == 0.0);
  CHECK(thin(d, 0).rows() == 100);
  CHECK(thin(d, 500).rows() == 100);
}
