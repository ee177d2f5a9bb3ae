#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boxsearch/rng.hpp"
#include "boxsearch/strategy.hpp"

namespace boxsearch {

enum class StrategyKind { cord, universal, memory, astar, pareto, uniform_replacement };

StrategyKind parse_strategy(const std::string& name);
std::string strategy_name(StrategyKind kind);

// ---- closed-form survival matrices -------------------------------------
//
// universal and memory proceed in phases of two queries; their matrices
// are stored in single-query time, with the first query of phase t at
// column 2t-1.  Phase t of universal draws an unordered pair from the
// unchecked part of {1..(k+1)t}; phase t of memory draws twice, with
// replacement, from {1..kt}.  tail_bound is the worst per-box tail at the
// horizon, so the bracket stays valid for any prior on these boxes.

StrategyMatrix matrix_universal(int x_max, int k, int horizon);
StrategyMatrix matrix_memory(int x_max, int k, int horizon);

// One query per step from the unchecked part of {1..min(M, floor(t/sigma))},
// sigma = b/(b+k-1) taken from the pareto prior.  Exact, zero tail.
StrategyMatrix matrix_pareto(const BoxPrior& prior, int k);

// The water-filling schedule itself, as a survival matrix.
StrategyMatrix matrix_astar(const BoxPrior& prior, int k);

// Memoryless uniform draw from {1..M} every query.
StrategyMatrix matrix_uniform_replacement(int M, int k, int horizon);

// Uniform draw from the unchecked part of {1..M}: survival (M-t)/M for
// every box.  The order-blind competitor used in optimality checks.
StrategyMatrix matrix_uniform_norepl(int M);

// ---- exact k-agent expected times ---------------------------------------
//
// Per-box times for the phase strategies carry certified brackets: the
// series is summed explicitly for ~8x the activation phase, then the tail
// is sandwiched by integral bounds of its proven power-law envelopes.

TimeBracket universal_box_time(int64_t x, int k);
TimeBracket memory_box_time(int64_t x, int k);

TimeBracket universal_prior_time(const BoxPrior& prior, int k);
TimeBracket memory_prior_time(const BoxPrior& prior, int k);

// O(M) evaluator for the specialized searcher: survival products shared
// across boxes through one cumulative product and one suffix sum.
double pareto_strategy_time(const BoxPrior& prior, int k);

double uniform_replacement_time(int M, int k);  // 1 / (1 - (1-1/M)^k)

// ---- pareto window bookkeeping -------------------------------------------

// min(M, floor(t (b+k-1)/b)); the single definition every consumer shares,
// so floor rounding can never put sampler and matrix out of step.
int64_t pareto_window(int64_t t, double b, int k, int64_t M);

// Smallest t whose window reaches x.
int64_t pareto_first_step(int64_t x, double b, int k, int64_t M);

// ---- samplers -------------------------------------------------------------

// Box checked by coordinated agent agent_id (1-based) at step t.
int64_t sample_cord(int agent_id, int64_t t, int k);

// Immutable per-configuration tables shared by all agents and trials.
struct StrategyContext {
  StrategyKind kind = StrategyKind::astar;
  int k = 2;   // the k the strategy is tuned for
  int M = 0;   // boxes in the prior being searched
  double b = 0.0;
  // astar only:
  Eigen::ArrayXd alpha;
  Eigen::ArrayXi active;
  Eigen::ArrayXd q;
  int support = 0;
};

StrategyContext make_context(StrategyKind kind, const BoxPrior& prior, int configured_k);

// One agent's in-trial state.  reset() rebinds it to a (seed, trial)
// stream; sample_step(t) executes query t (1-based) and returns the box
// checked, or 0 for an idle step (possible only when a finite window has
// been exhausted).
class Searcher {
 public:
  Searcher(const StrategyContext& ctx, int agent_id);

  void reset(uint64_t seed, uint64_t trial);
  int64_t sample_step(int64_t t);

 private:
  int64_t step_astar(int64_t t);
  int64_t step_pool_draw(int64_t window);

  const StrategyContext* ctx_;
  int agent_id_;
  Philox rng_;
  std::vector<int64_t> pool_;  // unchecked boxes the strategy may draw from
  std::vector<double> new_w_;  // scratch: weights of this step's new boxes
  int64_t appended_ = 0;       // boxes already moved into the pool
};

// Checked boxes of one agent, grouped per phase for the two-query
// strategies and per query otherwise.  Idle steps show as empty groups.
struct CheckSequence {
  int agent_id = 1;
  uint64_t seed = 0;
  uint64_t trial = 0;
  std::vector<std::vector<int64_t>> steps;
};

CheckSequence trace_agent(const StrategyContext& ctx, int agent_id, uint64_t seed,
                          uint64_t trial, int64_t queries);

}  // namespace boxsearch
