#include <doctest.h>

#include <cmath>

#include "boxsearch/continuum.hpp"

using namespace boxsearch;

TEST_CASE("continuum parameters and golden ratios") {
  const ContinuumParams p(0.5, 2);
  CHECK(p.sigma == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(u_opt(p) == doctest::Approx(14.0 / 27.0).epsilon(1e-14));
  CHECK(pareto_ratio_limit(p) == doctest::Approx(14.0 / 9.0).epsilon(1e-14));

  const ContinuumParams q(1.0, 2);
  CHECK(q.sigma == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pareto_ratio_limit(q) == doctest::Approx(5.0 / 3.0).epsilon(1e-14));

  CHECK_THROWS_AS(ContinuumParams(0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(ContinuumParams(1.2, 2), std::invalid_argument);
  CHECK_THROWS_AS(ContinuumParams(0.5, 1), std::invalid_argument);
}

TEST_CASE("opt profile branches") {
  const ContinuumParams p(0.5, 2);
  const double s = p.sigma;
  CHECK(opt_value(p, 0.9, 0.0) == 1.0);
  CHECK(opt_value(p, 0.9, s * 0.9) == 1.0);           // not yet reachable
  CHECK(opt_value(p, 0.5, 1.1) == 0.0);               // everything checked
  CHECK(opt_value(p, 1.0, 1.0) == 0.0);
  // Water-level branch needs sigma*x < t <= sigma: (sigma x / t)^(b/(k-1)).
  const double t1 = 0.5 * s;
  CHECK(opt_value(p, 0.25, t1) ==
        doctest::Approx(std::pow(s * 0.25 / t1, 0.5)).epsilon(1e-13));
  // Linear drain branch above sigma.
  const double t2 = 0.7;
  CHECK(opt_value(p, 1.0, t2) ==
        doctest::Approx((1.0 - t2) / (1.0 - s)).epsilon(1e-13));
  // Continuity across t = sigma at fixed x.
  CHECK(opt_value(p, 0.8, s - 1e-9) ==
        doctest::Approx(opt_value(p, 0.8, s + 1e-9)).epsilon(1e-6));
  CHECK_THROWS_AS(opt_value(p, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(opt_value(p, 1.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(opt_value(p, 0.5, -0.1), std::invalid_argument);
}

TEST_CASE("closed form matches quadrature across the grid") {
  for (double b : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
    for (int k : {2, 3, 5, 10}) {
      const ContinuumParams p(b, k);
      const double exact = u_opt(p);
      const double quad = u_opt_quadrature(p);
      CHECK(std::abs(quad - exact) <= 1e-7 * exact);
    }
  }
}

TEST_CASE("ratio limit is the scaled opt mass") {
  for (double b : {0.25, 0.6, 1.0}) {
    for (int k : {2, 4}) {
      const ContinuumParams p(b, k);
      CHECK(pareto_ratio_limit(p) ==
            doctest::Approx(k * (2.0 - b) * u_opt(p)).epsilon(1e-15));
    }
  }
}

TEST_CASE("product-vs-power inequality holds and is asymptotically tight") {
  for (double phi : {0.1, 0.5, 1.0}) {
    for (long a : {1L, 2L, 7L, 40L}) {
      for (long b : {0L, 1L, 10L, 500L}) {
        const GammaCheck c = gamma_product_check(a, a + b, phi);
        CHECK(c.holds);
        CHECK(c.log_lhs <= c.log_rhs + 1e-9);
      }
    }
  }
  // Large a: the two sides agree to O(phi^2 / a).
  const GammaCheck tight = gamma_product_check(1000, 4000, 0.5);
  CHECK(tight.log_rhs - tight.log_lhs < 1e-3);
  CHECK_THROWS_AS(gamma_product_check(3, 2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(gamma_product_check(1, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma_product_check(1, 2, 1.5), std::invalid_argument);
}

TEST_CASE("waterfill rejects bad inputs") {
  Eigen::ArrayXd c(2);
  c << 1.0, 0.5;
  CHECK_THROWS_AS(discrete_waterfill(c, -1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(discrete_waterfill(c, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(discrete_waterfill(Eigen::ArrayXd(), 1.0, 2), std::invalid_argument);
  Eigen::ArrayXd neg(2);
  neg << 1.0, -0.5;
  CHECK_THROWS_AS(discrete_waterfill(neg, 1.0, 2), std::invalid_argument);
}
