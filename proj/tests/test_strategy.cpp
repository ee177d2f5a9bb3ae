#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "boxsearch/common.hpp"
#include "boxsearch/continuum.hpp"
#include "boxsearch/prior.hpp"
#include "boxsearch/rng.hpp"
#include "boxsearch/strategy.hpp"

using namespace boxsearch;

namespace {

BoxPrior threebox() {
  Eigen::ArrayXd raw(3);
  raw << 0.5, 1.0 / 3.0, 1.0 / 6.0;
  return make_custom(raw);
}

double objective(const Eigen::ArrayXd& c, const Eigen::ArrayXd& f, int k) {
  double s = 0.0;
  for (int x = 0; x < c.size(); ++x) s += c(x) * ipow(f(x), k);
  return s;
}

// Projected gradient reference for the column problem: minimize
// sum c f^k over the box [0,1]^n cut by sum(1-f) <= T.  Slow but
// independent of the scan in discrete_waterfill.
Eigen::ArrayXd pgd_waterfill(const Eigen::ArrayXd& c, double T, int k) {
  const auto n = static_cast<int>(c.size());
  const double need = n - T;  // minimum feasible sum of f
  auto project = [&](Eigen::ArrayXd f) {
    f = f.min(1.0).max(0.0);
    if (f.sum() >= need) return f;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double lam = 0.5 * (lo + hi);
      ((f + lam).min(1.0).max(0.0).sum() >= need ? hi : lo) = lam;
    }
    return (f + hi).min(1.0).max(0.0).eval();
  };
  Eigen::ArrayXd f = project(Eigen::ArrayXd::Ones(n));
  const double scale = c.maxCoeff() * k;
  for (int it = 0; it < 20000; ++it) {
    const double eta = 2.0 / (scale * (1.0 + it * 0.01));
    Eigen::ArrayXd g(n);
    for (int x = 0; x < n; ++x) g(x) = k * c(x) * ipow(f(x), k - 1);
    f = project(f - eta * g);
  }
  return f;
}

}  // namespace

TEST_CASE("three-box golden schedule") {
  const BoxPrior p = threebox();
  const LSchedule s = build_L(p, 2);

  CHECK(s.support == 3);
  CHECK(std::isinf(s.alpha(0)));
  CHECK(s.alpha(1) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(s.alpha(2) == doctest::Approx(1.0 / 11.0).epsilon(1e-14));
  CHECK(s.alpha(3) == 0.0);
  CHECK(s.active(1) == 2);
  CHECK(s.active(2) == 3);

  CHECK(s.L.survival(0, 1) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(s.L.survival(1, 1) == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(s.L.survival(2, 1) == 1.0);
  CHECK(s.L.survival(0, 2) == doctest::Approx(2.0 / 11.0).epsilon(1e-14));
  CHECK(s.L.survival(1, 2) == doctest::Approx(3.0 / 11.0).epsilon(1e-14));
  CHECK(s.L.survival(2, 2) == doctest::Approx(6.0 / 11.0).epsilon(1e-14));
  CHECK((s.L.survival.col(3) == 0.0).all());

  CHECK(astar_exact_time(p, 2) == doctest::Approx(481.0 / 330.0).epsilon(1e-14));
  CHECK(cord_time(p, 2) == doctest::Approx(7.0 / 6.0).epsilon(1e-14));

  const TimeBracket T = expected_time(s.L, p, 2);
  CHECK(T.lower == doctest::Approx(481.0 / 330.0).epsilon(1e-13));
  CHECK(T.width() == 0.0);
  CHECK(validate(s.L).empty());
}

TEST_CASE("water_schedule matches the schedule inside build_L") {
  for (int k : {2, 3, 5}) {
    const BoxPrior p = make_pareto(0.5, 40);
    const LSchedule full = build_L(p, k);
    const WaterSchedule w = water_schedule(p, k);
    CHECK(w.support == full.support);
    for (int t = 0; t <= p.boxes(); ++t) {
      CHECK(w.active(t) == full.active(t));
      if (t > 0) CHECK(w.alpha(t) == doctest::Approx(full.alpha(t)).epsilon(1e-15));
    }
  }
}

TEST_CASE("uniform prior closed form") {
  // Equal masses make every box active from t = 1, so the schedule is the
  // no-replacement scan: T = sum_{j=1..M} (j/M)^k.
  for (int M : {1, 2, 3, 7}) {
    for (int k : {2, 3, 4}) {
      double want = 0.0;
      for (int j = 1; j <= M; ++j) want += ipow(static_cast<double>(j) / M, k);
      CHECK(astar_exact_time(make_uniform(M), k) ==
            doctest::Approx(want).epsilon(1e-13));
    }
  }
  CHECK(cord_time(make_uniform(4), 2) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(cord_time(make_uniform(1), 3) == 1.0);
}

TEST_CASE("single box degenerates cleanly") {
  const BoxPrior p = make_uniform(1);
  const LSchedule s = build_L(p, 2);
  CHECK(s.support == 1);
  CHECK(s.L.survival(0, 0) == 1.0);
  CHECK(s.L.survival(0, 1) == 0.0);
  CHECK(astar_exact_time(p, 2) == 1.0);
}

TEST_CASE("schedule rejects k < 2") {
  CHECK_THROWS_AS(build_L(make_uniform(3), 1), std::invalid_argument);
  CHECK_THROWS_AS(astar_exact_time(make_uniform(3), 1), std::invalid_argument);
}

TEST_CASE("validate flags each defect kind") {
  StrategyMatrix N;
  N.survival = Eigen::ArrayXXd::Ones(3, 4);
  CHECK(validate(N).empty());

  SUBCASE("range") {
    N.survival(0, 1) = 1.2;
    const auto v = validate(N);
    REQUIRE(!v.empty());
    CHECK(std::any_of(v.begin(), v.end(), [](const Violation& w) {
      return w.kind == ViolationKind::range && w.x == 1 && w.t == 1;
    }));
  }
  SUBCASE("initial") {
    N.survival(1, 0) = 0.9;
    const auto v = validate(N);
    REQUIRE(!v.empty());
    CHECK(std::any_of(v.begin(), v.end(), [](const Violation& w) {
      return w.kind == ViolationKind::initial && w.x == 2;
    }));
  }
  SUBCASE("monotone") {
    N.survival(2, 1) = 0.5;
    N.survival(2, 2) = 0.8;
    N.survival(2, 3) = 0.8;
    const auto v = validate(N);
    REQUIRE(!v.empty());
    CHECK(std::any_of(v.begin(), v.end(), [](const Violation& w) {
      return w.kind == ViolationKind::monotone && w.x == 3 && w.t == 2;
    }));
  }
  SUBCASE("column overdraw") {
    // Two boxes fully checked after one query: mass 2 > t = 1.
    N.survival(0, 1) = N.survival(0, 2) = N.survival(0, 3) = 0.0;
    N.survival(1, 1) = N.survival(1, 2) = N.survival(1, 3) = 0.0;
    const auto v = validate(N);
    REQUIRE(!v.empty());
    CHECK(std::any_of(v.begin(), v.end(), [](const Violation& w) {
      return w.kind == ViolationKind::column && w.t == 1 && w.magnitude > 0.9;
    }));
  }
}

TEST_CASE("expected_time demands a tail when survival persists") {
  const BoxPrior p = make_uniform(3);
  StrategyMatrix N;
  N.survival = Eigen::ArrayXXd::Ones(3, 3);
  N.survival(0, 1) = 0.5;
  N.survival(0, 2) = 0.25;
  CHECK_THROWS_AS(expected_time(N, p, 2), IncompleteMatrix);

  N.tail_bound = 0.75;
  const TimeBracket T = expected_time(N, p, 2);
  CHECK(T.upper == doctest::Approx(T.lower + 0.75).epsilon(1e-13));

  // Survival ending in zeros needs no tail.
  StrategyMatrix Z;
  Z.survival = Eigen::ArrayXXd::Zero(2, 3);
  Z.survival.col(0) = 1.0;
  Z.survival(0, 1) = 0.5;
  CHECK_NOTHROW(expected_time(Z, make_uniform(2), 2));
}

TEST_CASE("waterfill columns match an independent projected-gradient solve") {
  Philox rng(7, 0, 0);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(4));
    Eigen::ArrayXd c(n);
    for (int x = 0; x < n; ++x) c(x) = 0.05 + rng.next_double();
    for (int k : {2, 3}) {
      for (double T : {0.5, 1.0 + rng.next_double() * (n - 1.0)}) {
        const Eigen::ArrayXd f = discrete_waterfill(c, T, k);
        CHECK((n - f.sum()) <= T + 1e-9);
        CHECK((f >= 0.0).all());
        CHECK((f <= 1.0).all());
        const Eigen::ArrayXd g = pgd_waterfill(c, T, k);
        CHECK(objective(c, f, k) <= objective(c, g, k) + 1e-6);
      }
    }
  }
}

TEST_CASE("waterfill ignores ordering and saturates zero-mass boxes") {
  Eigen::ArrayXd c(4);
  c << 0.1, 2.0, 0.0, 0.7;
  const Eigen::ArrayXd f = discrete_waterfill(c, 1.5, 2);
  CHECK(f(2) == 1.0);
  Eigen::ArrayXd sorted(4);
  sorted << 2.0, 0.7, 0.1, 0.0;
  const Eigen::ArrayXd fs = discrete_waterfill(sorted, 1.5, 2);
  CHECK(f(1) == doctest::Approx(fs(0)).epsilon(1e-12));
  CHECK(f(3) == doctest::Approx(fs(1)).epsilon(1e-12));
  CHECK(f(0) == doctest::Approx(fs(2)).epsilon(1e-12));
}

TEST_CASE("schedule columns equal discrete_waterfill at every budget") {
  const BoxPrior p = make_pareto(0.7, 25);
  const LSchedule s = build_L(p, 2);
  for (int t = 0; t <= p.boxes(); ++t) {
    const Eigen::ArrayXd f =
        discrete_waterfill(p.masses, static_cast<double>(t), 2);
    for (int x = 0; x < p.boxes(); ++x)
      CHECK(s.L.survival(x, t) == doctest::Approx(f(x)).epsilon(1e-10));
  }
}

TEST_CASE("alpha is minimal: shrinking it breaks the budget") {
  const BoxPrior p = threebox();
  const LSchedule s = build_L(p, 2);
  const QWeights w = q_weights(p, 2);
  for (int t = 1; t < s.support; ++t) {
    const double a = s.alpha(t) * (1.0 - 1e-6);
    double checked = 0.0;
    for (int x = 0; x < p.boxes(); ++x)
      checked += 1.0 - std::min(1.0, a * w.q(x));
    CHECK(checked > static_cast<double>(t));
  }
}
