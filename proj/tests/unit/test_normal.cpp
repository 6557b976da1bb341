#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>

#include "zcurve/normal.hpp"

namespace normal = zcurve::normal;

namespace {
const boost::math::normal_distribution<double> ref;
}

TEST_CASE("cdf and sf match Boost across the line") {
  for (double x = -37.0; x <= 8.0; x += 0.0625) {
    const double c = boost::math::cdf(ref, x);
    CHECK(normal::cdf(x) == doctest::Approx(c).epsilon(1e-13));
    const double s = boost::math::cdf(boost::math::complement(ref, x));
    CHECK(normal::sf(x) == doctest::Approx(s).epsilon(1e-13));
  }
  CHECK(normal::cdf(0.0) == 0.5);
  CHECK(std::isnan(normal::cdf(std::numeric_limits<double>::quiet_NaN())));
}

TEST_CASE("pdf and log_pdf") {
  for (double x = -10.0; x <= 10.0; x += 0.37) {
    CHECK(normal::pdf(x) == doctest::Approx(boost::math::pdf(ref, x)).epsilon(1e-14));
    CHECK(normal::log_pdf(x) == doctest::Approx(std::log(boost::math::pdf(ref, x))).epsilon(1e-13));
  }
  const boost::math::normal_distribution<double> shifted(1.5, 0.3);
  CHECK(normal::log_pdf(2.0, 1.5, 0.3) == doctest::Approx(std::log(boost::math::pdf(shifted, 2.0))).epsilon(1e-13));
}

TEST_CASE("quantile matches Boost and inverts cdf") {
  for (double p : {1e-300, 1e-100, 1e-20, 1e-8, 0.001, 0.01, 0.02425, 0.025, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975,
                   0.99, 0.999, 1.0 - 1e-10}) {
    const double q = boost::math::quantile(ref, p);
    CHECK(normal::quantile(p) == doctest::Approx(q).epsilon(1e-12));
  }
  // Above ~3 the round trip is limited by cdf rounding toward 1.
  for (double x = -30.0; x <= 3.0; x += 0.25) {
    CHECK(normal::quantile(normal::cdf(x)) == doctest::Approx(x).epsilon(1e-10));
  }
  for (double x = 3.0; x <= 30.0; x += 0.25) {
    CHECK(-normal::quantile(normal::sf(x)) == doctest::Approx(x).epsilon(1e-10));
  }
  CHECK(normal::quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-15));
  CHECK(normal::quantile(0.0) == -std::numeric_limits<double>::infinity());
  CHECK(normal::quantile(1.0) == std::numeric_limits<double>::infinity());
  CHECK(std::isnan(normal::quantile(1.5)));
  CHECK(std::isnan(normal::quantile(-0.1)));
}

TEST_CASE("interval probability") {
  CHECK(normal::interval(-1.96, 1.96) == doctest::Approx(0.9500042097035593).epsilon(1e-14));
  CHECK(normal::interval(8.0, 9.0) ==
        doctest::Approx(boost::math::cdf(boost::math::complement(ref, 8.0)) -
                        boost::math::cdf(boost::math::complement(ref, 9.0)))
            .epsilon(1e-12));
  CHECK(normal::interval(-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(normal::interval(1.0, 1.0) == 0.0);
  CHECK(normal::interval(2.0, 1.0) == 0.0);
}
