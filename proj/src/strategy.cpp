#include "boxsearch/strategy.hpp"

#include <cmath>
#include <limits>

namespace boxsearch {

std::vector<Violation> validate(const StrategyMatrix& N) {
  std::vector<Violation> out;
  const int M = N.boxes();
  const int H = N.horizon();
  for (int x = 1; x <= M; ++x) {
    double first = N.survival(x - 1, 0);
    if (std::abs(first - 1.0) > 1e-12)
      out.push_back({ViolationKind::initial, x, 0, std::abs(first - 1.0)});
    for (int t = 0; t <= H; ++t) {
      double v = N.survival(x - 1, t);
      if (!(v >= -1e-12) || !(v <= 1.0 + 1e-12))
        out.push_back({ViolationKind::range, x, t, v});
      if (t > 0) {
        double rise = v - N.survival(x - 1, t - 1);
        if (rise > 1e-12) out.push_back({ViolationKind::monotone, x, t, rise});
      }
    }
  }
  for (int t = 0; t <= H; ++t) {
    KahanSum checked;
    for (int x = 0; x < M; ++x) checked.add(1.0 - N.survival(x, t));
    double excess = checked.value() - static_cast<double>(t);
    if (excess > 1e-9) out.push_back({ViolationKind::column, 0, t, excess});
  }
  return out;
}

TimeBracket expected_time(const StrategyMatrix& N, const BoxPrior& prior, int k) {
  if (k < 2) throw std::invalid_argument("expected_time needs k >= 2");
  const int support = prior.support();
  if (N.boxes() < support)
    throw std::invalid_argument("survival matrix does not cover the prior's support");
  const int H = N.horizon();
  if (N.tail_bound == 0.0) {
    for (int x = 1; x <= support; ++x) {
      if (prior.masses(x - 1) > 0.0 && N.survival(x - 1, H) > 0.0)
        throw IncompleteMatrix("survival still positive at horizon " + std::to_string(H) +
                               " (box " + std::to_string(x) + ") and no tail bound given");
    }
  }
  KahanSum sum;
  for (int t = 0; t <= H; ++t) {
    for (int x = 0; x < support; ++x) {
      double m = prior.masses(x);
      if (m > 0.0) sum.add(static_cast<long double>(m) * ipow(N.survival(x, t), k));
    }
  }
  return {sum.value(), sum.value() + N.tail_bound};
}

double cord_time(const BoxPrior& prior, int k) {
  if (k < 1) throw std::invalid_argument("cord_time needs k >= 1");
  KahanSum sum;
  for (int x = 1; x <= prior.boxes(); ++x)
    sum.add(prior.masses(x - 1) * static_cast<double>((x + k - 1) / k));
  return sum.value();
}

namespace {

// alpha/active profile plus the prefix sums both consumers read; the dense
// matrix is filled only by build_L, so the O(M) evaluator stays O(M).
struct ScheduleCore {
  Eigen::ArrayXd alpha;
  Eigen::ArrayXi active;
  std::vector<double> prefix_q;  // prefix_q[y] = q(1)+...+q(y) over the support
  int support = 0;
};

ScheduleCore solve_schedule(const BoxPrior& prior, const QWeights& w) {
  const int M = prior.boxes();
  const int support = prior.support();

  ScheduleCore s;
  s.support = support;
  s.prefix_q.assign(support + 1, 0.0);
  {
    KahanSum run;
    for (int y = 1; y <= support; ++y) {
      run.add(w.q(y - 1));
      s.prefix_q[y] = run.value();
    }
  }

  s.alpha = Eigen::ArrayXd::Zero(M + 1);
  s.active = Eigen::ArrayXi::Zero(M + 1);
  s.alpha(0) = std::numeric_limits<double>::infinity();

  int y = 1;
  for (int t = 1; t < support; ++t) {
    // First y whose checked mass would overshoot the budget ends the
    // active prefix; an exact hit (S == t) keeps y active and scans on.
    while (y <= support) {
      double S = static_cast<double>(y) - s.prefix_q[y] / w.q(y - 1);
      if (S > static_cast<double>(t)) break;
      ++y;
    }
    int ac = y - 1;
    double alpha = (static_cast<double>(ac) - t) / s.prefix_q[ac];
    // The column must consume its budget exactly; anything else means the
    // scan landed on an inconsistent prefix.
    double col = static_cast<double>(ac) - alpha * s.prefix_q[ac];
    if (!(alpha >= 0.0) || std::abs(col - t) > 1e-7 * std::max(1.0, static_cast<double>(t)))
      throw SolveError("schedule column " + std::to_string(t) + " failed its budget check");
    s.active(t) = ac;
    s.alpha(t) = alpha;
  }
  for (int t = support; t <= M; ++t) {
    s.active(t) = support;
    s.alpha(t) = 0.0;
  }
  return s;
}

}  // namespace

LSchedule build_L(const BoxPrior& prior, int k) {
  const QWeights w = q_weights(prior, k);
  ScheduleCore core = solve_schedule(prior, w);
  const int M = prior.boxes();
  const int support = core.support;

  LSchedule s;
  s.support = support;
  s.alpha = std::move(core.alpha);
  s.active = std::move(core.active);
  s.L.tail_bound = 0.0;
  s.L.survival.resize(M, M + 1);
  for (int t = 0; t <= M; ++t) {
    for (int x = 1; x <= M; ++x) {
      double v;
      if (x > support) {
        v = 1.0;  // zero-mass boxes are never touched
      } else if (t == 0) {
        v = 1.0;
      } else if (t >= support) {
        v = 0.0;
      } else {
        v = std::min(1.0, s.alpha(t) * w.q(x - 1));
      }
      s.L.survival(x - 1, t) = v;
    }
  }
  return s;
}

WaterSchedule water_schedule(const BoxPrior& prior, int k) {
  const QWeights w = q_weights(prior, k);
  ScheduleCore core = solve_schedule(prior, w);
  return {std::move(core.alpha), std::move(core.active), core.support};
}

double astar_exact_time(const BoxPrior& prior, int k) {
  if (k < 2) throw std::invalid_argument("astar_exact_time needs k >= 2");
  const QWeights w = q_weights(prior, k);
  const ScheduleCore s = solve_schedule(prior, w);
  const int support = s.support;

  std::vector<double> prefix_p(support + 1, 0.0);
  {
    KahanSum rp;
    for (int y = 1; y <= support; ++y) {
      rp.add(prior.masses(y - 1));
      prefix_p[y] = rp.value();
    }
  }

  // sum_x p(x) L(x,t)^k splits at ac(t): active boxes contribute
  // alpha^k * sum q (p q^k collapses to q), the rest survive whole.
  KahanSum total;
  total.add(1.0);  // t = 0
  for (int t = 1; t < support; ++t) {
    int ac = s.active(t);
    total.add(ipow(s.alpha(t), k) * s.prefix_q[ac]);
    total.add(1.0 - prefix_p[ac]);
  }
  return total.value();
}

}  // namespace boxsearch
