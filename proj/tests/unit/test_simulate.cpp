#include <doctest.h>

#include <cmath>

#include "zcurve/ingest.hpp"
#include "zcurve/simulate.hpp"

using namespace zcurve;

TEST_CASE("no censoring keeps every study") {
  SimConfig cfg;
  cfg.k = 250;
  const auto sim = simulate_studies(cfg);
  CHECK(sim.data.size() == 250);
  CHECK(sim.generated == 250);
}

TEST_CASE("one-sided significance filter under the null") {
  SimConfig cfg;
  cfg.k = 500;
  cfg.d = 0.0;
  cfg.tau = 0.0;
  cfg.seed = 3;
  cfg.survival.cuts = Cutpoints::make(Sidedness::one_sided, {0.05});
  cfg.survival.probabilities = {0.0, 1.0};
  const auto sim = simulate_studies(cfg);
  REQUIRE(sim.data.size() == 500);
  for (const auto& s : sim.data.studies) CHECK(s.z() >= 1.6448536269514722);
  // Retention rate is 5%: generated ~ NegBin with mean k / 0.05.
  const double mean = 500.0 / 0.05;
  const double sd = std::sqrt(500.0 * 0.95) / 0.05;
  CHECK(std::fabs(static_cast<double>(sim.generated) - mean) < 4.0 * sd);
}

TEST_CASE("uncensored z histogram has no jump at 1.96") {
  SimConfig cfg;
  cfg.seed = 8;
  auto counts = [](const Dataset& d, double lo) {
    double c = 0.0;
    for (const auto& s : d.studies) c += s.z() >= lo && s.z() < lo + 0.25;
    return c;
  };
  // Adjacent bins at the default size.
  const auto small = simulate_studies(cfg).data;
  const double below = counts(small, 1.71), above = counts(small, 1.96);
  CHECK(std::fabs(below - above) < 4.0 * std::sqrt(below + above));

  // With many studies the density slope dominates; compare the step at 1.96
  // with the neighbouring steps instead.
  cfg.k = 20000;
  const auto big = simulate_studies(cfg).data;
  const double c0 = counts(big, 1.46), c1 = counts(big, 1.71), c2 = counts(big, 1.96), c3 = counts(big, 2.21);
  const double jump = (c2 - c1) - 0.5 * ((c1 - c0) + (c3 - c2));
  CHECK(std::fabs(jump) < 4.0 * std::sqrt(2.25 * (c1 + c2) + 0.25 * (c0 + c3)));
}

TEST_CASE("moderate preset") {
  const auto s = Survival::moderate();
  CHECK(s(2.0) == 1.0);
  CHECK(s(1.7) == 1.0);
  CHECK(s(1.5) == 0.05);
  CHECK(s(-3.0) == 0.05);
  SimConfig cfg;
  cfg.survival = s;
  cfg.seed = 12;
  const auto sim = simulate_studies(cfg);
  CHECK(sim.data.size() == 300);
  CHECK(sim.generated > 300);
  const double odr = observed_discovery_rate(sim.data);
  CHECK(odr > 0.45);
  CHECK(odr < 0.70);
}

TEST_CASE("simulation is deterministic in the seed") {
  SimConfig cfg;
  cfg.k = 50;
  cfg.survival = Survival::moderate();
  const auto a = simulate_studies(cfg);
  const auto b = simulate_studies(cfg);
  CHECK(a.data == b.data);
  CHECK(a.generated == b.generated);
  cfg.seed = 2;
  CHECK_FALSE(simulate_studies(cfg).data == a.data);
}

TEST_CASE("Cohen's d standard error") {
  CHECK(cohens_d_se(0.0, 50, 50) == doctest::Approx(std::sqrt(0.04)));
  // Equal groups of n: 2/n + d^2/(4 * 2n).
  CHECK(cohens_d_se(0.8, 25, 25) == doctest::Approx(std::sqrt(2.0 / 25 + 0.64 / 200.0)).epsilon(1e-15));
  CHECK(cohens_d_se(0.5, 10, 20) == doctest::Approx(std::sqrt(30.0 / 200.0 + 0.25 / 120.0)));
}

TEST_CASE("configuration errors") {
  SimConfig cfg;
  cfg.k = 0;
  CHECK_THROWS_AS(simulate_studies(cfg), ValidationError);
  cfg = {};
  cfg.tau = -0.1;
  CHECK_THROWS_AS(simulate_studies(cfg), ValidationError);
  cfg = {};
  cfg.survival.cuts = Cutpoints::make(Sidedness::one_sided, {0.05});
  cfg.survival.probabilities = {1.2, 1.0};
  CHECK_THROWS_AS(simulate_studies(cfg), ValidationError);
  cfg.survival.probabilities = {0.0, 0.0};
  CHECK_THROWS_AS(simulate_studies(cfg), ValidationError);

  cfg = {};
  cfg.d = 0.0;
  cfg.tau = 0.0;
  cfg.survival.cuts = Cutpoints::make(Sidedness::one_sided, {0.0001});
  cfg.survival.probabilities = {0.0, 1.0};
  cfg.max_candidates = 1000;
  CHECK_THROWS_AS(simulate_studies(cfg), NumericalError);
}

TEST_CASE("provenance record") {
  SimConfig cfg;
  cfg.k = 20;
  cfg.seed = 99;
  cfg.survival = Survival::moderate();
  const auto sim = simulate_studies(cfg);
  const auto j = provenance_json(sim);
  CHECK(j.at("seed").get<std::uint64_t>() == 99);
  CHECK(j.at("generated").get<std::size_t>() == sim.generated);
  CHECK(j.at("retained").get<std::size_t>() == 20);
  CHECK(j.at("survival").at("probabilities")[0].get<double>() == 0.05);
}
