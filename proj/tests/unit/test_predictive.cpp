#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "zcurve/ingest.hpp"
#include "zcurve/predictive.hpp"

using namespace zcurve;

namespace {

Dataset data() {
  return parse_table("y,se\n0.42,0.20\n0.10,0.15\n0.35,0.30\n-0.05,0.25\n0.28,0.12\n0.51,0.40\n0.9,0.3\n");
}

PredictiveDraw selection_draw(double mu, double tau, oracle::Weights w) {
  PredictiveDraw d;
  d.bias = BiasKind::selection;
  d.mu = mu;
  d.tau = tau;
  d.weights = WeightFunction(w.two_sided ? Sidedness::two_sided : Sidedness::one_sided, w.alphas, w.omegas);
  return d;
}

// Mean over studies of se * density of Y at z * se, written from scratch.
double oracle_fitted(double mu, double tau, const oracle::Weights& w, const Dataset& d, double z) {
  double sum = 0.0;
  for (const auto& s : d.studies) {
    const double se = s.se();
    const double sd = std::sqrt(tau * tau + se * se);
    sum += se * oracle::norm_pdf(z * se, mu, sd) * w(z) / oracle::selection_integral(mu, tau, se, w);
  }
  return sum / d.size();
}

}  // namespace

TEST_CASE("fitted density matches the definition") {
  const auto d = data();
  const oracle::Weights w{true, {0.05, 0.10}, {0.2, 0.5, 1.0}};
  const auto draw = selection_draw(0.2, 0.15, w);
  for (double z : {-3.0, -1.0, 0.0, 0.7, 1.7, 2.2, 4.0}) {
    CHECK(fitted_density(draw, d, z) == doctest::Approx(oracle_fitted(0.2, 0.15, w, d, z)).epsilon(1e-10));
  }
}

TEST_CASE("fitted density integrates to one") {
  const auto d = data();
  std::mt19937_64 rng(21);
  for (int i = 0; i < 25; ++i) {
    const auto w = oracle::random_weights(rng);
    const auto draw = selection_draw(0.3, 0.1, w);
    const auto f = [&](double z) { return fitted_density(draw, d, z); };
    const double mass = oracle::integrate_pieces(f, -30.0, 30.0, w.breaks(), 1e-12);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fitted_density_mass(draw, d) == doctest::Approx(1.0).epsilon(1e-8));
  }
  PredictiveDraw pet;
  pet.bias = BiasKind::pet;
  pet.mu = 0.1;
  pet.tau = 0.2;
  pet.beta = 1.5;
  CHECK(fitted_density_mass(pet, d) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("extrapolated density dominates the fitted density") {
  const auto d = data();
  const oracle::Weights w{false, {0.05, 0.5}, {0.1, 0.4, 1.0}};
  const auto draw = selection_draw(0.1, 0.2, w);
  for (double z = -5.0; z <= 5.0; z += 0.01) {
    const double f = fitted_density(draw, d, z);
    const double e = extrapolated_density(draw, d, z);
    CHECK(e >= f);
    if (w(z) == 1.0) {
      CHECK(std::fabs(e - f) <= 1e-12);
    }
  }
  // Printed formula scales by I instead of 1 / I.
  CHECK(extrapolated_density(draw, d, 0.0, Formula::printed) < extrapolated_density(draw, d, 0.0));
}

TEST_CASE("PET extrapolation drops the slope") {
  const auto d = data();
  PredictiveDraw pet;
  pet.bias = BiasKind::pet;
  pet.mu = 0.1;
  pet.tau = 0.2;
  pet.beta = 2.0;
  PredictiveDraw plain = pet;
  plain.bias = BiasKind::none;
  plain.beta = 0.0;
  for (double z : {-2.0, 0.0, 1.0, 3.0}) {
    CHECK(extrapolated_density(pet, d, z) == doctest::Approx(fitted_density(plain, d, z)).epsilon(1e-14));
  }
  CHECK(edr(pet, d) == edr(plain, d));
  CHECK(n_missing(pet, d) == 0.0);
}

TEST_CASE("unadjusted draws extrapolate to themselves") {
  const auto d = data();
  PredictiveDraw re;
  re.mu = 0.3;
  re.tau = 0.1;
  for (double z : {-1.0, 0.5, 2.5}) CHECK(extrapolated_density(re, d, z) == fitted_density(re, d, z));
  CHECK(n_missing(re, d) == 0.0);
  CHECK(mean_selection_integral(re, d) == 1.0);
}

TEST_CASE("EDR of null draws is alpha") {
  const auto d = data();
  PredictiveDraw null;
  CHECK(edr(null, d) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(critical_z() == doctest::Approx(1.959963984540054).epsilon(1e-15));
  CHECK(edr(null, d, critical_z(0.01)) == doctest::Approx(0.01).epsilon(1e-13));
}

TEST_CASE("EDR matches the definition") {
  const auto d = data();
  PredictiveDraw draw;
  draw.mu = 0.25;
  draw.tau = 0.12;
  double expected = 0.0;
  for (const auto& s : d.studies) {
    const double sd = std::sqrt(0.12 * 0.12 + s.se() * s.se());
    const auto f = [&](double y) { return oracle::norm_pdf(y, 0.25, sd); };
    const double c = 1.959963984540054 * s.se();
    expected += oracle::integrate_pieces(f, c, 0.25 + 40 * sd, {}) + oracle::integrate_pieces(f, 0.25 - 40 * sd, -c, {});
  }
  CHECK(edr(draw, d) == doctest::Approx(expected / d.size()).epsilon(1e-10));
}

TEST_CASE("false discovery risk bound") {
  for (double e : {0.05, 0.18, 0.27, 0.32, 0.59, 0.61, 0.9}) {
    CHECK(fdr_from_edr(e) == doctest::Approx(oracle::soric_fdr(e)).epsilon(1e-15));
  }
  CHECK(fdr_from_edr(0.27) == doctest::Approx(0.1423).epsilon(1e-3));
  CHECK(fdr_from_edr(0.01) == 1.0);
  bool zero = false;
  CHECK(fdr_from_edr(0.0, 0.05, &zero) == 1.0);
  CHECK(zero);
  CHECK(fdr_from_edr(1.0) == 0.0);
}

TEST_CASE("expected number of missing studies") {
  const auto d = data();
  const oracle::Weights w{false, {0.05}, {0.05, 1.0}};
  const auto draw = selection_draw(0.0, 0.0, w);
  double ibar = 0.0;
  for (const auto& s : d.studies) ibar += oracle::selection_integral(0.0, 0.0, s.se(), w);
  ibar /= d.size();
  CHECK(ibar == doctest::Approx(0.05 * 0.95 + 0.05).epsilon(1e-12));
  CHECK(n_missing(draw, d) == doctest::Approx(d.size() * (1 - ibar) / ibar).epsilon(1e-12));
  CHECK(n_missing(draw, d, Formula::printed) == doctest::Approx(d.size() * (1 - ibar)).epsilon(1e-12));
}

TEST_CASE("bias metrics summaries") {
  const auto d = data();
  std::vector<PredictiveDraw> draws(3);
  draws[0].mu = 0.0;
  draws[1].mu = 0.3;
  draws[2].mu = 0.6;
  MetricOptions opt;
  opt.keep_draws = true;
  const auto m = bias_metrics(draws, d, opt, 2);
  REQUIRE(m.edr_draws.size() == 3);
  CHECK(m.edr.median == m.edr_draws[1]);
  CHECK(m.edr_draws[0] == doctest::Approx(0.05));
  CHECK(m.n_missing.upper == 0.0);
  CHECK(m.odr == observed_discovery_rate(d));
  CHECK(bias_metrics(draws, d, opt, 1).edr.lower == m.edr.lower);
  CHECK_THROWS_AS(bias_metrics(std::vector<PredictiveDraw>{}, d), ValidationError);
}

TEST_CASE("pointwise band and trapezoid") {
  DensityMatrix m;
  m.rows = 5;
  m.cols = 2;
  m.values = {1, 10, 2, 20, 3, 30, 4, 40, 5, 50};
  const auto band = pointwise_band(m, 0.5);
  CHECK(band.mean[0] == 3.0);
  CHECK(band.lower[0] == doctest::Approx(2.0));
  CHECK(band.upper[1] == doctest::Approx(40.0));
  const std::vector<double> x{0.0, 1.0, 3.0};
  const std::vector<double> y{1.0, 3.0, 3.0};
  CHECK(trapezoid(x, y) == 8.0);
}

TEST_CASE("predictive curve on a grid") {
  const auto d = data();
  const oracle::Weights w{true, {0.05}, {0.3, 1.0}};
  std::vector<PredictiveDraw> draws{selection_draw(0.2, 0.1, w), selection_draw(0.3, 0.2, w)};
  GridConfig grid;
  const auto r = predictive_curve(draws, d, grid);
  CHECK(r.curve.grid.size() == 601);
  CHECK(r.curve.mass_fitted == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.curve.mass_extrapolated > r.curve.mass_fitted);
  CHECK(r.warnings.empty());
  GridConfig narrow;
  narrow.z_min = 0.0;
  narrow.z_max = 1.0;
  narrow.points = 51;
  CHECK_FALSE(predictive_curve(draws, d, narrow).warnings.empty());
  GridConfig bad;
  bad.points = 1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}
