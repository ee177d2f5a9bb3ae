#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "boxsearch/prior.hpp"
#include "boxsearch/searchers.hpp"

namespace boxsearch {

// The agent makes no queries at or after `time`; rounds keep advancing in
// lockstep for the others.
struct CrashEvent {
  int agent_id = 0;
  int64_t time = 0;
};

struct SimConfig {
  BoxPrior prior;
  StrategyKind strategy = StrategyKind::astar;
  int k = 2;
  int64_t trials = 0;
  uint64_t seed = 0;
  std::vector<CrashEvent> crash_schedule;
  int configured_k = 0;  // k the strategy is tuned for; 0 means k itself
};

struct SimOutcome {
  std::vector<int64_t> discovery_times;  // -1 marks a censored trial
  std::vector<int64_t> treasure_boxes;   // the draw each trial searched for
  double mean = 0.0;       // over uncensored trials
  double std_error = 0.0;  // Welford, 0 when fewer than two samples
  int64_t censored = 0;    // trials where every agent crashed pre-discovery
  int64_t no_ops = 0;      // idle steps summed over agents and trials
};

// Per trial: treasure drawn from the prior on its own stream (agent slot
// 0), k agents stepped in lockstep rounds, discovery at the earliest round
// whose query hits the treasure.  Bitwise deterministic in (config, seed)
// for any thread count.  threads = 0 picks the hardware count.
SimOutcome run(const SimConfig& config, int threads = 0);

struct PairedOutcome {
  SimOutcome faulty;
  SimOutcome clean;
  double pooled_stderr = 0.0;
};

// The crashed run against a crash-free run with the surviving agent count,
// same seeds.  Throws SolveError if the faulty mean beats the clean mean
// by more than four pooled standard errors.
PairedOutcome run_with_faults(const SimConfig& config, int threads = 0);

// Frequency that box x is still unchecked by a single tagged agent after
// t queries; rows x = 1..x_max, cols t = 0..t_max.  The sampled twin of a
// StrategyMatrix.  Requires trials >= 10^4.
Eigen::ArrayXXd empirical_survival(const SimConfig& config, int x_max, int t_max,
                                   int threads = 0);

}  // namespace boxsearch
