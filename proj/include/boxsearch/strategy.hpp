#pragma once

#include <vector>

#include <Eigen/Dense>

#include "boxsearch/common.hpp"
#include "boxsearch/prior.hpp"

namespace boxsearch {

// survival(x-1, t) = probability that one agent has not checked box x
// within its first t queries.  Column t = 0 is all ones.  tail_bound caps
// the k-agent expected-time mass beyond the stored horizon for any prior
// supported on these boxes.
struct StrategyMatrix {
  Eigen::ArrayXXd survival;
  double tail_bound = 0.0;

  int boxes() const { return static_cast<int>(survival.rows()); }
  int horizon() const { return static_cast<int>(survival.cols()) - 1; }
};

enum class ViolationKind { range, initial, monotone, column };

struct Violation {
  ViolationKind kind;
  int x;  // 1-based box, 0 when the violation is column-wide
  int t;
  double magnitude;
};

// Empty result iff the matrix is a valid single-agent survival function:
// entries in [0,1], first column all ones, rows non-increasing, and each
// column's checked mass sum_x (1 - N(x,t)) at most t (+1e-9 slack).
std::vector<Violation> validate(const StrategyMatrix& N);

// sum_t sum_x p(x) N(x,t)^k, bracketed by the stored tail bound.  Throws
// IncompleteMatrix when survival on the prior's support is still positive
// at the horizon and no tail bound is available.
TimeBracket expected_time(const StrategyMatrix& N, const BoxPrior& prior, int k);

// Expected discovery time of the fully coordinated baseline where agent i
// takes box (t-1)k + i at step t: sum_x p(x) ceil(x/k).
double cord_time(const BoxPrior& prior, int k);

// Water-filling schedule: the survival function every valid strategy is
// measured against.  alpha(t) and active(t) describe column t of L as
// L(x,t) = min(1, alpha(t) q(x)) for x <= active(t), with alpha(0) = +inf
// and alpha(t) = 0 once t reaches the support size.
struct LSchedule {
  Eigen::ArrayXd alpha;   // t = 0..M
  Eigen::ArrayXi active;  // ac(t), t = 0..M, non-decreasing
  StrategyMatrix L;       // M x (M+1)
  int support = 0;
};

LSchedule build_L(const BoxPrior& prior, int k);

// The schedule alone, O(M) memory.  Samplers and large-M evaluators use
// this; build_L adds the dense matrix on top of it.
struct WaterSchedule {
  Eigen::ArrayXd alpha;   // t = 0..M, alpha(0) = +inf
  Eigen::ArrayXi active;  // ac(t), t = 0..M, non-decreasing
  int support = 0;
};

WaterSchedule water_schedule(const BoxPrior& prior, int k);

// Same value as expected_time(build_L(p,k).L, p, k) but O(M) via prefix
// sums; exact (zero tail).
double astar_exact_time(const BoxPrior& prior, int k);

}  // namespace boxsearch
