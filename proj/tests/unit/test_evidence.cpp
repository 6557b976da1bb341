#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "../oracles.hpp"
#include "zcurve/evidence.hpp"
#include "zcurve/mcmc.hpp"

using namespace zcurve;

namespace {

Dataset make_data(const std::vector<double>& y, const std::vector<double>& se) {
  Dataset d;
  for (std::size_t i = 0; i < y.size(); ++i) d.studies.emplace_back(y[i], se[i]);
  return d;
}

const std::vector<double> ys{0.42, 0.10, 0.35, -0.05, 0.28, 0.51, 0.22, 0.15, 0.61, 0.05};
const std::vector<double> ses{0.20, 0.15, 0.30, 0.25, 0.12, 0.40, 0.18, 0.22, 0.35, 0.11};

ModelSpec fixed_effect() {
  ModelSpec spec;
  spec.label = "fe";
  spec.effect = Prior::normal(0.1, 0.8);
  spec.heterogeneity = Prior::spike(0.0);
  return spec;
}

}  // namespace

TEST_CASE("quadrature evidence of the conjugate fixed-effect model") {
  const auto data = make_data(ys, ses);
  const PosteriorTarget target(fixed_effect(), data);
  const auto est = log_marginal_quadrature(target);
  CHECK(est.method == EvidenceMethod::quadrature);
  CHECK(est.log_ml == doctest::Approx(oracle::fixed_effect_log_marginal(ys, ses, 0.1, 0.8)).epsilon(1e-9));
}

TEST_CASE("zero-dimensional model evidence is the likelihood") {
  const auto data = make_data(ys, ses);
  ModelSpec spec = fixed_effect();
  spec.effect = Prior::spike(0.0);
  const PosteriorTarget target(spec, data);
  const auto est = log_marginal_quadrature(target);
  CHECK(est.method == EvidenceMethod::exact);
  CHECK(est.log_ml == doctest::Approx(oracle::fixed_effect_log_marginal(ys, ses, 0.0, 1e-300)).epsilon(1e-12));
}

TEST_CASE("importance sampling agrees with the closed form") {
  const auto data = make_data(ys, ses);
  const auto spec = fixed_effect();
  SamplerConfig cfg;
  cfg.warmup = 1000;
  cfg.iterations = 2000;
  cfg.seed = 5;
  const auto draws = sample_posterior(spec, data, cfg);
  const PosteriorTarget target(spec, data);
  ImportanceOptions opt;
  opt.seed = 77;
  const auto est = log_marginal_importance(target, draws, opt);
  CHECK(est.method == EvidenceMethod::importance);
  const double exact = oracle::fixed_effect_log_marginal(ys, ses, 0.1, 0.8);
  CHECK(std::fabs(est.log_ml - exact) < 0.02);
  CHECK(std::fabs(est.log_ml - exact) < 5.0 * est.error + 1e-3);
  CHECK(est.ess_fraction > 0.5);
  CHECK(log_marginal_importance(target, draws, opt).log_ml == est.log_ml);
}

TEST_CASE("quadrature rejects dimensions above the limit") {
  const auto data = make_data(ys, ses);
  ModelSpec spec;
  spec.bias = BiasKind::selection;
  spec.selection = Cutpoints::make(Sidedness::two_sided, {0.05});
  spec.omega_concentration = {1.0, 1.0};
  const PosteriorTarget target(spec, data);
  QuadratureOptions opt;
  opt.max_dimension = 2;
  CHECK_THROWS_AS(log_marginal_quadrature(target, opt), ValidationError);
}

TEST_CASE("default model space") {
  const auto space = default_model_space();
  CHECK(space.size() == 36);
  CHECK_NOTHROW(space.validate());
  double total = 0.0;
  for (const auto& s : space.specs) total += s.prior_prob;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(space.prior_inclusion(Component::effect) == doctest::Approx(0.5));
  CHECK(space.prior_inclusion(Component::heterogeneity) == doctest::Approx(0.5));
  CHECK(space.prior_inclusion(Component::bias) == doctest::Approx(0.5));
  CHECK(space.specs.front().label == "mu0.tau0.none");
  int selection = 0, pet = 0, peese = 0;
  for (const auto& s : space.specs) {
    selection += s.bias == BiasKind::selection;
    pet += s.bias == BiasKind::pet;
    peese += s.bias == BiasKind::peese;
  }
  CHECK(selection == 24);
  CHECK(pet == 4);
  CHECK(peese == 4);

  auto broken = space;
  broken.specs[0].prior_prob += 0.01;
  CHECK_THROWS_AS(broken.validate(), ValidationError);
}

TEST_CASE("posterior model probabilities and inclusion Bayes factors") {
  ModelSpace space;
  for (int e = 0; e < 2; ++e) {
    ModelSpec s;
    s.label = e ? "mu" : "mu0";
    s.effect = e ? Prior::normal(0.0, 1.0) : Prior::spike(0.0);
    s.heterogeneity = Prior::spike(0.0);
    s.prior_prob = 0.5;
    space.specs.push_back(s);
  }
  const std::vector<double> log_ml{-10.0, -10.0 + std::log(3.0)};
  const auto post = posterior_model_probs(space, log_ml);
  CHECK(post[0] == doctest::Approx(0.25));
  CHECK(post[1] == doctest::Approx(0.75));
  const auto bf = inclusion_bf(space, post, Component::effect);
  CHECK(bf.flag == InclusionBayesFactor::Flag::finite);
  CHECK(bf.value == doctest::Approx(3.0));

  const std::vector<double> lopsided{-5000.0, 0.0};
  const auto p2 = posterior_model_probs(space, lopsided);
  CHECK(p2[0] == 0.0);
  CHECK(inclusion_bf(space, p2, Component::effect).flag == InclusionBayesFactor::Flag::infinite);
  const std::vector<double> reversed{0.0, -5000.0};
  CHECK(inclusion_bf(space, posterior_model_probs(space, reversed), Component::effect).flag ==
        InclusionBayesFactor::Flag::zero);

  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<double> none{ninf, ninf};
  CHECK_THROWS_AS(posterior_model_probs(space, none), NumericalError);

  const auto cond = conditional_probs(space, post, Component::effect);
  CHECK(cond[0] == 0.0);
  CHECK(cond[1] == 1.0);
}

TEST_CASE("model-averaged draws follow the mixture weights") {
  ModelSpace space;
  std::vector<PosteriorDraws> fits(2);
  for (int k = 0; k < 2; ++k) {
    ModelSpec s;
    s.label = "m" + std::to_string(k);
    s.effect = Prior::normal(0.0, 1.0);
    s.heterogeneity = Prior::spike(0.0);
    s.prior_prob = 0.5;
    space.specs.push_back(s);
    fits[k].names = {"mu"};
    for (int i = 0; i < 100; ++i) {
      fits[k].values.push_back(k * 10.0 + i);
      fits[k].chain_ids.push_back(0);
    }
  }
  const std::vector<double> probs{0.3, 0.7};
  const auto draws = model_averaged_draws(space, fits, probs, 20000, 4);
  REQUIRE(draws.size() == 20000);
  std::size_t second = 0;
  for (const auto& d : draws) {
    second += d.model == 1;
    CHECK(d.theta.tau == 0.0);
  }
  CHECK(second / 20000.0 == doctest::Approx(0.7).epsilon(0.03));
  const auto again = model_averaged_draws(space, fits, probs, 20000, 4);
  CHECK(again.front().theta.mu == draws.front().theta.mu);
  CHECK(again.back().model == draws.back().model);
}
