#include "boxsearch/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <ostream>

#include "boxsearch/continuum.hpp"
#include "boxsearch/montecarlo.hpp"
#include "boxsearch/prior.hpp"
#include "boxsearch/searchers.hpp"
#include "boxsearch/strategy.hpp"

namespace boxsearch {

namespace {

template <typename... Args>
std::string strfmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct NamedPrior {
  std::string name;
  BoxPrior prior;
};

std::vector<NamedPrior> golden_priors() {
  Eigen::ArrayXd three(3);
  three << 0.5, 1.0 / 3.0, 1.0 / 6.0;
  std::vector<NamedPrior> g;
  g.push_back({"threebox", make_custom(three)});
  g.push_back({"uniform3", make_uniform(3)});
  g.push_back({"uniform10", make_uniform(10)});
  g.push_back({"uniform50", make_uniform(50)});
  g.push_back({"pareto-b0.5-M1000", make_pareto(0.5, 1000)});
  return g;
}

constexpr int kBoundKs[] = {2, 3, 5, 10};

}  // namespace

std::vector<Check> verify_gamma() {
  long total = 0;
  long violations = 0;
  double worst = -1e300;  // max log_lhs - log_rhs, must stay <= ~0
  long worst_a = 0, worst_b = 0;
  double worst_phi = 0;
  for (int pi = 1; pi <= 20; ++pi) {
    const double phi = static_cast<double>(pi) / 20.0;
    for (long a = 1; a <= 200; ++a) {
      for (long b = a; b <= 200; ++b) {
        const GammaCheck g = gamma_product_check(a, b, phi);
        ++total;
        if (!g.holds) ++violations;
        const double margin = g.log_lhs - g.log_rhs;
        if (margin > worst) {
          worst = margin;
          worst_a = a;
          worst_b = b;
          worst_phi = phi;
        }
      }
    }
  }
  std::vector<Check> out;
  out.push_back({"gamma-product-grid", violations == 0,
                 strfmt("%ld points (a<=b<=200, phi grid), %ld violations; max log excess "
                        "%.3e at a=%ld b=%ld phi=%.2f (required <= 0)",
                        total, violations, worst, worst_a, worst_b, worst_phi)});
  return out;
}

std::vector<Check> verify_bounds() {
  std::vector<Check> out;
  for (const int k : kBoundKs) {
    {
      double min_slack = 1e300;
      int64_t worst_x = 0;
      double worst_T = 0, worst_bound = 0;
      bool ok = true;
      for (int64_t s = 1;; ++s) {
        const int64_t x = (s - 1) * (k + 1) + 1;  // smallest box of the phase group
        if (x > 10'000) break;
        const TimeBracket T = universal_box_time(x, k);
        const double bound =
            10.0 + 4.0 * k * static_cast<double>(x) / ((k + 1.0) * (k + 1.0));
        const double slack = bound - T.upper;
        if (slack < min_slack) {
          min_slack = slack;
          worst_x = x;
          worst_T = T.upper;
          worst_bound = bound;
        }
        if (T.upper > bound) ok = false;
      }
      out.push_back({strfmt("universal-box-bound-k%d", k), ok,
                     strfmt("x<=10^4: min slack %.4f at x=%lld (certified upper %.4f vs "
                            "bound %.4f)",
                            min_slack, static_cast<long long>(worst_x), worst_T,
                            worst_bound)});
    }
    {
      double min_slack = 1e300;
      int64_t worst_x = 0;
      double worst_T = 0, worst_bound = 0;
      bool ok = true;
      for (int64_t s = 1;; ++s) {
        const int64_t x = (s - 1) * k + 1;
        if (x > 10'000) break;
        const TimeBracket T = memory_box_time(x, k);
        const double bound = 2.0 + 4.0 * static_cast<double>(s);
        const double slack = bound - T.upper;
        if (slack < min_slack) {
          min_slack = slack;
          worst_x = x;
          worst_T = T.upper;
          worst_bound = bound;
        }
        if (T.upper > bound) ok = false;
      }
      out.push_back({strfmt("memory-box-bound-k%d", k), ok,
                     strfmt("x<=10^4: min slack %.4f at x=%lld (certified upper %.4f vs "
                            "bound %.4f)",
                            min_slack, static_cast<long long>(worst_x), worst_T,
                            worst_bound)});
    }
  }

  double min_slack = 1e300;
  std::string worst_case;
  bool ok = true;
  for (const NamedPrior& g : golden_priors()) {
    for (const int k : kBoundKs) {
      const double lhs = universal_prior_time(g.prior, k).upper;
      const double ratio = 4.0 * k * k / ((k + 1.0) * (k + 1.0));
      const double rhs = 10.0 + ratio * cord_time(g.prior, k);
      const double slack = rhs - lhs;
      if (slack < min_slack) {
        min_slack = slack;
        worst_case = strfmt("%s k=%d (%.4f vs %.4f)", g.name.c_str(), k, lhs, rhs);
      }
      if (lhs > rhs) ok = false;
    }
  }
  out.push_back({"universal-vs-cord-golden", ok,
                 strfmt("T(universal) <= 10 + 4(k/(k+1))^2 T(cord); min slack %.4f at %s",
                        min_slack, worst_case.c_str())});
  return out;
}

namespace {

BoxPrior random_prior(Philox& rng) {
  const int M = 1 + static_cast<int>(rng.next_below(20));
  Eigen::ArrayXd raw(M);
  for (int i = 0; i < M; ++i) raw(i) = rng.next_double();
  std::sort(raw.data(), raw.data() + M, std::greater<double>());
  if (raw(0) <= 0.0) raw(0) = 0.5;  // all-zero draw is astronomically unlikely
  return make_custom(raw);
}

// Horizon long enough that the stored part dominates: twice the certified
// series length for the slowest box.
int competitor_horizon(int64_t s_max) {
  return static_cast<int>(2 * std::max<int64_t>(24 * s_max, s_max + 192) + 2);
}

}  // namespace

std::vector<Check> verify_optimality(uint64_t seed) {
  std::vector<Check> out;

  {  // worked 3-box example, exact values
    Eigen::ArrayXd three(3);
    three << 0.5, 1.0 / 3.0, 1.0 / 6.0;
    const BoxPrior p = make_custom(three);
    const LSchedule L = build_L(p, 2);
    double err = 0.0;
    auto track = [&](double got, double want) {
      err = std::max(err, std::abs(got - want));
    };
    track(L.alpha(1), 0.2);
    track(L.alpha(2), 1.0 / 11.0);
    track(L.alpha(3), 0.0);
    const double col1[] = {0.4, 0.6, 1.0};
    const double col2[] = {2.0 / 11.0, 3.0 / 11.0, 6.0 / 11.0};
    for (int x = 0; x < 3; ++x) {
      track(L.L.survival(x, 0), 1.0);
      track(L.L.survival(x, 1), col1[x]);
      track(L.L.survival(x, 2), col2[x]);
      track(L.L.survival(x, 3), 0.0);
    }
    track(astar_exact_time(p, 2), 481.0 / 330.0);
    const TimeBracket T = expected_time(L.L, p, 2);
    track(T.lower, 481.0 / 330.0);
    track(T.upper, 481.0 / 330.0);
    track(cord_time(p, 2), 7.0 / 6.0);
    out.push_back({"threebox-schedule", err <= 1e-12,
                   strfmt("alpha=(1/5,1/11,0), column t=2=(2/11,3/11,6/11), T=481/330, "
                          "cord=7/6; max deviation %.2e (tol 1e-12)",
                          err)});
  }

  {  // minimality against closed-form competitors + the two waterfill routes
    Philox rng(seed, 0, 0);
    double worst_gap = -1e300;
    std::string worst_case;
    double worst_col_diff = 0.0;
    int cases = 0;

    auto run_case = [&](const BoxPrior& prior, int k, const char* tag) {
      const int M = prior.boxes();
      const LSchedule L = build_L(prior, k);
      const double T_L = expected_time(L.L, prior, k).lower;

      auto consider = [&](double T_N, const char* comp) {
        const double gap = T_L - T_N;
        if (gap > worst_gap) {
          worst_gap = gap;
          worst_case = strfmt("%s k=%d vs %s", tag, k, comp);
        }
      };
      const int hor_u = competitor_horizon((M + k) / (k + 1));
      consider(expected_time(matrix_universal(M, k, hor_u), prior, k).lower, "universal");
      const int hor_m = competitor_horizon((M + k - 1) / k);
      consider(expected_time(matrix_memory(M, k, hor_m), prior, k).lower, "memory");
      consider(expected_time(matrix_uniform_norepl(M), prior, k).lower, "uniform-norepl");
      if (prior.kind == PriorKind::pareto)
        consider(expected_time(matrix_pareto(prior, k), prior, k).lower, "pareto");

      for (int t = 0; t <= M; ++t) {
        const Eigen::ArrayXd wf = discrete_waterfill(prior.masses, t, k);
        const double d = (L.L.survival.col(t) - wf).abs().maxCoeff();
        worst_col_diff = std::max(worst_col_diff, d);
      }
      ++cases;
    };

    for (int i = 0; i < 100; ++i) {
      const BoxPrior prior = random_prior(rng);
      for (const int k : {2, 3}) run_case(prior, k, "random");
    }
    for (const double b : {0.3, 0.5, 0.9})
      for (const int M : {5, 20})
        for (const int k : {2, 3}) run_case(make_pareto(b, M), k, "pareto-prior");

    out.push_back({"waterfill-minimal", worst_gap <= 1e-9,
                   strfmt("%d cases (random M<=20 plus pareto grid), max T(L)-T(N) = "
                          "%.3e (tol 1e-9) at %s",
                          cases, worst_gap, worst_case.c_str())});
    out.push_back({"waterfill-two-routes", worst_col_diff <= 1e-10,
                   strfmt("%d cases: max |L column - direct water-fill| = %.3e (tol 1e-10)",
                          cases, worst_col_diff)});
  }

  {  // uniform closed forms
    double worst = 0.0;
    double worst_width = 0.0;
    bool contained = true;
    for (const int M : {1, 2, 3, 5, 10, 30}) {
      for (const int k : {2, 3, 4, 5}) {
        const BoxPrior u = make_uniform(M);
        KahanSum power_sum;
        for (int i = 0; i <= M; ++i) power_sum.add(ipow(static_cast<double>(i), k));
        const double astar_closed =
            power_sum.value() / ipow(static_cast<double>(M), k);
        worst = std::max(worst, std::abs(astar_exact_time(u, k) - astar_closed));

        const double repl_closed = 1.0 / (1.0 - ipow(1.0 - 1.0 / M, k));
        const TimeBracket T =
            expected_time(matrix_uniform_replacement(M, k, 40 * M / k + 64), u, k);
        if (repl_closed < T.lower - 1e-12 || repl_closed > T.upper + 1e-12)
          contained = false;
        worst_width = std::max(worst_width, T.width());
        worst = std::max(worst, std::abs(uniform_replacement_time(M, k) - repl_closed));
      }
    }
    out.push_back(
        {"uniform-closed-forms", worst <= 1e-10 && contained && worst_width <= 1e-10,
         strfmt("A-star sum formula and memoryless 1/(1-(1-1/M)^k) over M<=30, k<=5: "
                "max deviation %.2e, max bracket width %.2e (tol 1e-10)",
                worst, worst_width)});
  }

  return out;
}

std::vector<Check> verify_pareto_single(double b, int k, int64_t M) {
  const ContinuumParams cp(b, k);
  const double limit = pareto_ratio_limit(cp);
  const BoxPrior prior = make_pareto(b, static_cast<int>(M));
  const double ratio = pareto_strategy_time(prior, k) / cord_time(prior, k);
  const double rel = std::abs(ratio / limit - 1.0);
  const double tol = b > 0.7 ? 0.08 : 0.05;
  std::vector<Check> out;
  out.push_back({strfmt("pareto-ratio-b%g-k%d-M%lld", b, k, static_cast<long long>(M)),
                 rel <= tol,
                 strfmt("measured T(pareto)/T(cord) = %.6f vs limit %.6f; |rel err| "
                        "%.4f (tol %.2f)",
                        ratio, limit, rel, tol)});
  return out;
}

std::vector<Check> verify_pareto() {
  std::vector<Check> out;

  {  // finite-M convergence, b = 0.5
    const ContinuumParams cp(0.5, 2);
    const double limit = pareto_ratio_limit(cp);
    double dev[3];
    double ratio[3];
    const int64_t Ms[3] = {1'000, 10'000, 100'000};
    for (int i = 0; i < 3; ++i) {
      const BoxPrior prior = make_pareto(0.5, static_cast<int>(Ms[i]));
      ratio[i] = pareto_strategy_time(prior, 2) / cord_time(prior, 2);
      dev[i] = std::abs(ratio[i] - limit);
    }
    const bool monotone = dev[0] >= dev[1] && dev[1] >= dev[2];
    const bool close = std::abs(ratio[2] / limit - 1.0) <= 0.05;
    out.push_back({"pareto-ratio-convergence-b0.5-k2", monotone && close,
                   strfmt("ratios %.6f, %.6f, %.6f at M=10^3,10^4,10^5 vs limit %.6f "
                          "(14/9); deviations %.2e >= %.2e >= %.2e, final within 5%%",
                          ratio[0], ratio[1], ratio[2], limit, dev[0], dev[1], dev[2])});
  }

  {
    const auto single = verify_pareto_single(0.9, 2, 100'000);
    out.insert(out.end(), single.begin(), single.end());
  }

  {
    const double limit = pareto_ratio_limit(ContinuumParams(1.0, 2));
    const double err = std::abs(limit - 5.0 / 3.0);
    out.push_back({"pareto-limit-b1-k2", err <= 1e-12,
                   strfmt("limit formula gives %.15f vs 5/3, deviation %.2e (tol 1e-12)",
                          limit, err)});
  }

  {
    double worst_quad = 0.0;
    double worst_ident = 0.0;
    for (const double b : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
      for (const int k : {2, 3, 5, 10}) {
        const ContinuumParams cp(b, k);
        const double closed = u_opt(cp);
        worst_quad = std::max(worst_quad, std::abs(closed - u_opt_quadrature(cp)));
        worst_ident = std::max(
            worst_ident, std::abs(k * (2.0 - b) * closed - pareto_ratio_limit(cp)));
      }
    }
    out.push_back({"u-opt-quadrature", worst_quad <= 1e-6,
                   strfmt("closed form vs adaptive quadrature over (b,k) grid: max "
                          "deviation %.2e (tol 1e-6)",
                          worst_quad)});
    out.push_back({"ratio-identity", worst_ident <= 1e-12,
                   strfmt("k(2-b) u_opt vs limit formula: max deviation %.2e (tol 1e-12)",
                          worst_ident)});
  }

  return out;
}

std::vector<Check> verify_montecarlo(uint64_t seed, int threads) {
  std::vector<Check> out;
  int64_t total_no_ops = 0;

  for (const NamedPrior& g : golden_priors()) {
    std::vector<StrategyKind> kinds = {StrategyKind::cord, StrategyKind::universal,
                                       StrategyKind::memory, StrategyKind::astar,
                                       StrategyKind::uniform_replacement};
    if (g.prior.kind == PriorKind::pareto) kinds.push_back(StrategyKind::pareto);

    for (const StrategyKind kind : kinds) {
      double exact = 0.0;
      switch (kind) {
        case StrategyKind::cord: exact = cord_time(g.prior, 2); break;
        case StrategyKind::astar: exact = astar_exact_time(g.prior, 2); break;
        case StrategyKind::pareto: exact = pareto_strategy_time(g.prior, 2); break;
        case StrategyKind::uniform_replacement:
          exact = uniform_replacement_time(g.prior.boxes(), 2);
          break;
        case StrategyKind::universal: exact = universal_prior_time(g.prior, 2).mid(); break;
        case StrategyKind::memory: exact = memory_prior_time(g.prior, 2).mid(); break;
      }

      SimConfig cfg;
      cfg.prior = g.prior;
      cfg.strategy = kind;
      cfg.k = 2;
      cfg.trials = 1'000'000;
      cfg.seed = seed;
      const SimOutcome o = run(cfg, threads);
      total_no_ops += o.no_ops;
      const double z = o.std_error > 0 ? std::abs(o.mean - exact) / o.std_error : 0.0;
      out.push_back({strfmt("sim-agreement-%s-%s", strategy_name(kind).c_str(),
                            g.name.c_str()),
                     std::abs(o.mean - exact) <= 4.0 * o.std_error,
                     strfmt("mean %.6f vs exact %.6f, stderr %.6f, |z| = %.2f (tol 4)",
                            o.mean, exact, o.std_error, z)});
    }
  }

  out.push_back({"no-idle-steps", total_no_ops == 0,
                 strfmt("%lld idle steps across all agreement runs (required 0)",
                        static_cast<long long>(total_no_ops))});

  {  // paired fault comparison
    SimConfig cfg;
    cfg.prior = make_uniform(50);
    cfg.strategy = StrategyKind::astar;
    cfg.k = 3;
    cfg.trials = 100'000;
    cfg.seed = seed + 1;
    cfg.crash_schedule = {{3, 3}};
    cfg.configured_k = 2;
    try {
      const PairedOutcome p = run_with_faults(cfg, threads);
      out.push_back(
          {"fault-pairing", true,
           strfmt("k=3 f=1 tuned for 2: faulty mean %.4f <= clean mean %.4f + 4*%.4f",
                  p.faulty.mean, p.clean.mean, p.pooled_stderr)});
    } catch (const SolveError& e) {
      out.push_back({"fault-pairing", false, e.what()});
    }
  }

  {  // identical outcomes for any worker count
    SimConfig cfg;
    cfg.prior = make_uniform(20);
    cfg.strategy = StrategyKind::astar;
    cfg.k = 2;
    cfg.trials = 30'000;
    cfg.seed = seed + 2;
    const SimOutcome a = run(cfg, 1);
    const SimOutcome b = run(cfg, 4);
    const bool same = a.discovery_times == b.discovery_times &&
                      a.treasure_boxes == b.treasure_boxes &&
                      std::memcmp(&a.mean, &b.mean, sizeof a.mean) == 0 &&
                      std::memcmp(&a.std_error, &b.std_error, sizeof a.std_error) == 0 &&
                      a.censored == b.censored && a.no_ops == b.no_ops;
    out.push_back({"thread-count-determinism", same,
                   strfmt("threads=1 vs threads=4: outcomes %s (mean %.6f)",
                          same ? "bitwise identical" : "DIFFER", a.mean)});
  }

  {  // more searchers help
    SimConfig cfg;
    cfg.prior = make_uniform(50);
    cfg.strategy = StrategyKind::astar;
    cfg.trials = 200'000;
    cfg.seed = seed + 3;
    cfg.k = 2;
    const SimOutcome k2 = run(cfg, threads);
    cfg.k = 4;
    const SimOutcome k4 = run(cfg, threads);
    out.push_back({"monotone-in-k", k4.mean < k2.mean,
                   strfmt("astar uniform50: mean(k=4) %.4f < mean(k=2) %.4f", k4.mean,
                          k2.mean)});
  }

  return out;
}

std::vector<Check> verify_all(uint64_t seed, int threads) {
  std::vector<Check> out;
  auto append = [&](std::vector<Check> v) {
    out.insert(out.end(), std::make_move_iterator(v.begin()),
               std::make_move_iterator(v.end()));
  };
  append(verify_gamma());
  append(verify_bounds());
  append(verify_optimality(seed));
  append(verify_pareto());
  append(verify_montecarlo(seed, threads));
  return out;
}

int print_checks(const std::vector<Check>& checks, std::ostream& os) {
  int fails = 0;
  for (const Check& c : checks) {
    os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
    if (!c.pass) ++fails;
  }
  return fails;
}

}  // namespace boxsearch
