#include "boxsearch/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "boxsearch/common.hpp"

namespace boxsearch {

namespace {

// Fixed chunk size keeps the (trial -> stream, chunk -> accumulator)
// mapping independent of the worker count, which is what makes outcomes
// bitwise reproducible under any parallelism.
constexpr int64_t kChunk = 8192;

struct ChunkStats {
  int64_t n = 0;  // uncensored trials
  double mean = 0.0;
  double m2 = 0.0;
  int64_t censored = 0;
  int64_t no_ops = 0;
};

void welford_add(ChunkStats& c, double v) {
  ++c.n;
  const double d = v - c.mean;
  c.mean += d / static_cast<double>(c.n);
  c.m2 += d * (v - c.mean);
}

ChunkStats welford_merge(const ChunkStats& a, const ChunkStats& b) {
  ChunkStats out;
  out.n = a.n + b.n;
  out.censored = a.censored + b.censored;
  out.no_ops = a.no_ops + b.no_ops;
  if (out.n == 0) return out;
  const double d = b.mean - a.mean;
  out.mean = a.mean + d * (static_cast<double>(b.n) / static_cast<double>(out.n));
  out.m2 = a.m2 + b.m2 +
           d * d * (static_cast<double>(a.n) * static_cast<double>(b.n) /
                    static_cast<double>(out.n));
  return out;
}

int resolve_threads(int threads, int64_t n_chunks) {
  int nt = threads;
  if (nt <= 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    nt = hc ? static_cast<int>(hc) : 1;
  }
  return static_cast<int>(std::min<int64_t>(nt, std::max<int64_t>(n_chunks, 1)));
}

// Runs body(chunk_index) over all chunks on nt threads; the first
// exception aborts the remaining chunks and is rethrown on the caller.
template <typename Body>
void for_each_chunk(int64_t n_chunks, int nt, Body body) {
  std::atomic<int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const int64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        body(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(n_chunks);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nt - 1);
  for (int i = 1; i < nt; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> cumulative_masses(const BoxPrior& prior) {
  std::vector<double> cum(prior.boxes());
  KahanSum run;
  for (int x = 0; x < prior.boxes(); ++x) {
    run.add(prior.masses(x));
    cum[x] = run.value();
  }
  return cum;
}

// Inverse-CDF draw; ties in cum (zero-mass boxes) are skipped by the
// strict upper bound, and top-end rounding falls back to the support.
int64_t draw_treasure(const std::vector<double>& cum, int support, Philox& rng) {
  const double u = rng.next_double();
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  if (it == cum.end()) return support;
  const auto box = static_cast<int64_t>(it - cum.begin()) + 1;
  return std::min<int64_t>(box, support);
}

int resolve_configured_k(const SimConfig& cfg) {
  return cfg.configured_k == 0 ? cfg.k : cfg.configured_k;
}

void validate_config(const SimConfig& cfg, int ck) {
  if (cfg.trials < 1) throw std::invalid_argument("sim: trials must be >= 1");
  if (cfg.k < 1) throw std::invalid_argument("sim: k must be >= 1");
  if (ck > cfg.k)
    throw std::invalid_argument("sim: configured_k must not exceed the live agent count");
  if (cfg.strategy == StrategyKind::cord && ck != cfg.k)
    throw std::invalid_argument("sim: cord assigns boxes per agent, so configured_k must equal k");
  std::vector<bool> seen(static_cast<size_t>(cfg.k) + 1, false);
  for (const CrashEvent& ev : cfg.crash_schedule) {
    if (ev.agent_id < 1 || ev.agent_id > cfg.k)
      throw std::invalid_argument("sim: crash agent_id out of range");
    if (ev.time < 1) throw std::invalid_argument("sim: crash times must be >= 1");
    if (seen[ev.agent_id]) throw std::invalid_argument("sim: crashed agents must be unique");
    seen[ev.agent_id] = true;
  }
}

bool is_exhaustive(StrategyKind kind) {
  return kind == StrategyKind::cord || kind == StrategyKind::astar ||
         kind == StrategyKind::pareto;
}

}  // namespace

SimOutcome run(const SimConfig& cfg, int threads) {
  const int ck = resolve_configured_k(cfg);
  validate_config(cfg, ck);
  const StrategyContext ctx = make_context(cfg.strategy, cfg.prior, ck);
  const std::vector<double> cum = cumulative_masses(cfg.prior);
  const int support = cfg.prior.support();
  const int64_t M = cfg.prior.boxes();

  // Exhaustive strategies must finish within 10 M queries.  The sampled
  // windows have genuine polynomial tails (memory decays like t^-2 per
  // trial), so their cap only guards against a broken sampler: it sits
  // four orders of magnitude above any discovery time that is plausible
  // across millions of trials.
  const int64_t cap = is_exhaustive(cfg.strategy)
                          ? 10 * M
                          : std::max<int64_t>(1'000'000'000, 2000 * M);

  std::vector<int64_t> crash_time(static_cast<size_t>(cfg.k) + 1,
                                  std::numeric_limits<int64_t>::max());
  for (const CrashEvent& ev : cfg.crash_schedule) crash_time[ev.agent_id] = ev.time;

  const int64_t n_chunks = (cfg.trials + kChunk - 1) / kChunk;
  std::vector<ChunkStats> stats(n_chunks);

  SimOutcome out;
  out.discovery_times.assign(cfg.trials, -1);
  out.treasure_boxes.assign(cfg.trials, 0);

  for_each_chunk(n_chunks, resolve_threads(threads, n_chunks), [&](int64_t c) {
    std::vector<Searcher> agents;
    agents.reserve(cfg.k);
    for (int a = 1; a <= cfg.k; ++a) agents.emplace_back(ctx, a);

    ChunkStats cs;
    const int64_t lo = c * kChunk;
    const int64_t hi = std::min<int64_t>(cfg.trials, lo + kChunk);
    for (int64_t trial = lo; trial < hi; ++trial) {
      Philox placement(cfg.seed, static_cast<uint64_t>(trial), 0);
      const int64_t treasure = draw_treasure(cum, support, placement);
      out.treasure_boxes[trial] = treasure;
      for (auto& agent : agents) agent.reset(cfg.seed, static_cast<uint64_t>(trial));

      int64_t found = -1;
      for (int64_t t = 1; found < 0; ++t) {
        bool live = false;
        for (int a = 0; a < cfg.k; ++a) {
          if (crash_time[a + 1] <= t) continue;
          live = true;
          const int64_t box = agents[a].sample_step(t);
          if (box == 0) {
            ++cs.no_ops;
            continue;
          }
          if (box == treasure) {
            found = t;
            break;
          }
        }
        if (found > 0) break;
        if (!live) break;  // every agent crashed: censored trial
        if (t >= cap)
          throw RunawayError("sim: trial exceeded the hard query cap without discovery");
      }

      if (found > 0) {
        out.discovery_times[trial] = found;
        welford_add(cs, static_cast<double>(found));
      } else {
        ++cs.censored;
      }
    }
    stats[c] = cs;
  });

  ChunkStats total;
  for (const ChunkStats& cs : stats) total = welford_merge(total, cs);

  out.mean = total.mean;
  out.std_error = total.n >= 2 ? std::sqrt(total.m2 / static_cast<double>(total.n - 1) /
                                           static_cast<double>(total.n))
                               : 0.0;
  out.censored = total.censored;
  out.no_ops = total.no_ops;
  if (out.censored > 0)
    std::fprintf(stderr,
                 "warning: %lld of %lld trials censored (all agents crashed before "
                 "discovery); they are excluded from the mean\n",
                 static_cast<long long>(out.censored),
                 static_cast<long long>(cfg.trials));
  return out;
}

PairedOutcome run_with_faults(const SimConfig& cfg, int threads) {
  const int f = static_cast<int>(cfg.crash_schedule.size());
  if (f >= cfg.k)
    throw std::invalid_argument("run_with_faults: crash schedule must leave a live agent (f < k)");
  if (resolve_configured_k(cfg) > cfg.k - f)
    throw std::invalid_argument(
        "run_with_faults: strategy must be configured for the survivors (configured_k <= k - f)");

  PairedOutcome out;
  out.faulty = run(cfg, threads);

  SimConfig clean = cfg;
  clean.k = cfg.k - f;
  clean.configured_k = resolve_configured_k(cfg);  // same tuning, fewer agents
  clean.crash_schedule.clear();
  out.clean = run(clean, threads);

  out.pooled_stderr = std::sqrt(out.faulty.std_error * out.faulty.std_error +
                                out.clean.std_error * out.clean.std_error);
  if (out.faulty.mean > out.clean.mean + 4.0 * out.pooled_stderr)
    throw SolveError("run_with_faults: faulty mean exceeds the clean mean beyond 4 pooled stderr");
  return out;
}

Eigen::ArrayXXd empirical_survival(const SimConfig& cfg, int x_max, int t_max,
                                   int threads) {
  if (cfg.trials < 10'000)
    throw std::invalid_argument("empirical_survival: needs at least 10^4 trials");
  if (x_max < 1 || t_max < 0)
    throw std::invalid_argument("empirical_survival: x_max >= 1 and t_max >= 0 required");
  const int ck = resolve_configured_k(cfg);
  validate_config(cfg, ck);
  const StrategyContext ctx = make_context(cfg.strategy, cfg.prior, ck);

  // diff[x][t] accumulates +1 at 0 and -1 one past the first check, so a
  // single prefix pass yields unchecked counts; integer merges commute,
  // keeping the result thread-count independent.
  const int cols = t_max + 2;
  std::vector<int64_t> diff(static_cast<size_t>(x_max) * cols, 0);
  std::mutex merge_mu;

  const int64_t n_chunks = (cfg.trials + kChunk - 1) / kChunk;
  for_each_chunk(n_chunks, resolve_threads(threads, n_chunks), [&](int64_t c) {
    Searcher agent(ctx, 1);
    std::vector<int64_t> local(static_cast<size_t>(x_max) * cols, 0);
    std::vector<int64_t> first_check(static_cast<size_t>(x_max) + 1, 0);

    const int64_t lo = c * kChunk;
    const int64_t hi = std::min<int64_t>(cfg.trials, lo + kChunk);
    for (int64_t trial = lo; trial < hi; ++trial) {
      agent.reset(cfg.seed, static_cast<uint64_t>(trial));
      std::fill(first_check.begin(), first_check.end(), t_max + 1);
      for (int64_t t = 1; t <= t_max; ++t) {
        const int64_t box = agent.sample_step(t);
        if (box >= 1 && box <= x_max && first_check[box] > t) first_check[box] = t;
      }
      for (int x = 1; x <= x_max; ++x) {
        local[static_cast<size_t>(x - 1) * cols] += 1;
        local[static_cast<size_t>(x - 1) * cols + first_check[x]] -= 1;
      }
    }
    std::lock_guard<std::mutex> lock(merge_mu);
    for (size_t i = 0; i < diff.size(); ++i) diff[i] += local[i];
  });

  Eigen::ArrayXXd freq(x_max, t_max + 1);
  for (int x = 0; x < x_max; ++x) {
    int64_t count = 0;
    for (int t = 0; t <= t_max; ++t) {
      count += diff[static_cast<size_t>(x) * cols + t];
      freq(x, t) = static_cast<double>(count) / static_cast<double>(cfg.trials);
    }
  }
  return freq;
}

}  // namespace boxsearch
