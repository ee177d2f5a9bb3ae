#include "boxsearch/searchers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace boxsearch {

StrategyKind parse_strategy(const std::string& name) {
  if (name == "cord") return StrategyKind::cord;
  if (name == "universal") return StrategyKind::universal;
  if (name == "memory") return StrategyKind::memory;
  if (name == "astar") return StrategyKind::astar;
  if (name == "pareto") return StrategyKind::pareto;
  if (name == "uniform-replacement") return StrategyKind::uniform_replacement;
  throw std::invalid_argument(
      "unknown strategy '" + name +
      "' (expected cord|universal|memory|astar|pareto|uniform-replacement)");
}

std::string strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::cord: return "cord";
    case StrategyKind::universal: return "universal";
    case StrategyKind::memory: return "memory";
    case StrategyKind::astar: return "astar";
    case StrategyKind::pareto: return "pareto";
    case StrategyKind::uniform_replacement: return "uniform-replacement";
  }
  throw std::logic_error("unhandled strategy kind");
}

namespace {

// Phase t of universal owns queries 2t-1 and 2t; the box enters play at
// phase s.  u is the count of boxes this agent has not yet checked inside
// the phase window, so the two same-phase draws survive with 1-1/u and
// (1-1/u)(1-1/(u-1)).
int64_t universal_entry_phase(int64_t x, int k) { return (x + k) / (k + 1); }
int64_t memory_entry_phase(int64_t x, int k) { return (x + k - 1) / k; }

double universal_f1(int64_t t, int k) {
  const double u = static_cast<double>(k - 1) * static_cast<double>(t) + 2.0;
  return 1.0 - 1.0 / u;
}

double universal_f2(int64_t t, int k) {
  const double u = static_cast<double>(k - 1) * static_cast<double>(t) + 2.0;
  return (1.0 - 1.0 / u) * (1.0 - 1.0 / (u - 1.0));
}

double memory_f1(int64_t t, int k) {
  return 1.0 - 1.0 / (static_cast<double>(k) * static_cast<double>(t));
}

double memory_f2(int64_t t, int k) {
  const double f = memory_f1(t, k);
  return f * f;
}

void check_phase_args(int64_t x, int k, const char* who) {
  if (x < 1) throw std::invalid_argument(std::string(who) + ": box index must be >= 1");
  if (k < 1) throw std::invalid_argument(std::string(who) + ": k must be >= 1");
}

// Sum over t > H of c (t+shift)^-a for a > 1, bracketed by the integral
// rule for a positive decreasing convex integrand:
//   int_{H+1} g  <=  sum  <=  int_{H+1/2} g.
double tail_integral_lower(double c, double shift, double a, double H) {
  return c * std::pow(H + 1.0 + shift, 1.0 - a) / (a - 1.0);
}

double tail_integral_upper(double c, double shift, double a, double H) {
  return c * std::pow(H + 0.5 + shift, 1.0 - a) / (a - 1.0);
}

// Bracket for S = sum_{t > H} P(t)/P(H) where P(t)/P(H) is the product of
// f2(i)^k over i in (H, t].
//
// universal, k >= 3: f2(i) = i/(i+phi) with phi = 2/(k-1) <= 1, so the
// ratio lies between (H/t)^a and ((H+1)/t)^a with a = k phi.
// universal, k = 2: phi = 2 and the product telescopes exactly to
// (H+1)(H+2)/((t+1)(t+2)); squaring gives a C/(t+c)^4 envelope.
// memory: f2(i)^k = (1-1/(ki))^{2k}, squeezed between (H/t)^2 e^{-2/(kH)}
// and ((H+1)/t)^2.
TimeBracket universal_tail_sum(int k, double H) {
  if (k == 2) {
    const double C = ipow((H + 1.0) * (H + 2.0), 2);
    return {tail_integral_lower(C, 2.0, 4.0, H), tail_integral_upper(C, 1.0, 4.0, H)};
  }
  const double a = 2.0 * k / (k - 1.0);
  return {tail_integral_lower(std::pow(H, a), 0.0, a, H),
          tail_integral_upper(std::pow(H + 1.0, a), 0.0, a, H)};
}

TimeBracket memory_tail_sum(int k, double H) {
  const double lo_c = H * H * std::exp(-2.0 / (static_cast<double>(k) * H));
  return {tail_integral_lower(lo_c, 0.0, 2.0, H),
          tail_integral_upper((H + 1.0) * (H + 1.0), 1.0, 2.0, H)};
}

// Shared series body: T(x) = (2s-1) + sum_{t=s..H} [P(t-1) f1^k + P(t)]
// plus a tail.  P(t) is the k-agent survival after phase t; the odd query
// of phase t contributes P(t-1) f1(t)^k, the even one P(t).  The tail over
// t > H sits between 2 P(H) S_lo and P(H)(1 + 2 S_hi) because
// P(t) <= P(t-1) f1(t)^k <= P(t-1).
template <typename F1, typename F2, typename TailSum>
TimeBracket phase_box_time(int64_t s, int k, F1 f1, F2 f2, TailSum tail_sum) {
  // 24x the entry phase puts the bracket width near P(H) ~ (1/24)^2 even
  // for the slowest-decaying series (memory), well under simulation noise.
  const int64_t H = std::max<int64_t>(24 * s, s + 192);
  KahanSum sum;
  sum.add(static_cast<double>(2 * s - 1));
  double agent = 1.0;  // one-agent survival after the phases processed so far
  for (int64_t t = s; t <= H; ++t) {
    sum.add(ipow(agent * f1(t, k), k));
    agent *= f2(t, k);
    sum.add(ipow(agent, k));
  }
  const double P_H = ipow(agent, k);
  const TimeBracket S = tail_sum(k, static_cast<double>(H));
  const double body = sum.value();
  return {body + 2.0 * P_H * S.lower, body + P_H * (1.0 + 2.0 * S.upper)};
}

// Upper bound on the worst per-box expected-time mass past a stored query
// horizon, for the slowest box (entry phase s).  Only complete phases
// hp = horizon/2 are credited, which can only enlarge the bound.  With
// P = k-agent survival after phase hp, the uncounted queries sum to at
// most P (1 + 2 S_upper); a box not yet in play at the horizon adds its
// remaining all-ones columns first.
template <typename F2, typename TailSum>
double phase_matrix_tail(int64_t s, int k, int horizon, F2 f2, TailSum tail_sum) {
  const int64_t hp = horizon / 2;
  if (hp >= s) {
    double agent = 1.0;
    for (int64_t t = s; t <= hp; ++t) agent *= f2(t, k);
    return ipow(agent, k) * (1.0 + 2.0 * tail_sum(k, static_cast<double>(hp)).upper);
  }
  const auto ones = static_cast<double>(std::max<int64_t>(0, 2 * s - 2 - horizon));
  return ones + 1.0 + 2.0 * tail_sum(k, static_cast<double>(s - 1)).upper;
}

}  // namespace

TimeBracket universal_box_time(int64_t x, int k) {
  check_phase_args(x, k, "universal_box_time");
  return phase_box_time(universal_entry_phase(x, k), k, universal_f1, universal_f2,
                        universal_tail_sum);
}

TimeBracket memory_box_time(int64_t x, int k) {
  check_phase_args(x, k, "memory_box_time");
  return phase_box_time(memory_entry_phase(x, k), k, memory_f1, memory_f2,
                        memory_tail_sum);
}

namespace {

// Per-box time depends on x only through its entry phase, so prior-level
// sums reuse one bracket per phase group.
template <typename EntryPhase, typename BoxTime>
TimeBracket phase_prior_time(const BoxPrior& prior, int k, EntryPhase entry,
                             BoxTime box_time) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  KahanSum lo;
  KahanSum hi;
  int64_t cached_s = 0;
  TimeBracket br{0.0, 0.0};
  for (int x = 1; x <= prior.support(); ++x) {
    const int64_t s = entry(x, k);
    if (s != cached_s) {
      br = box_time(x, k);
      cached_s = s;
    }
    const double m = prior.masses(x - 1);
    lo.add(m * br.lower);
    hi.add(m * br.upper);
  }
  return {lo.value(), hi.value()};
}

}  // namespace

TimeBracket universal_prior_time(const BoxPrior& prior, int k) {
  return phase_prior_time(prior, k, universal_entry_phase, universal_box_time);
}

TimeBracket memory_prior_time(const BoxPrior& prior, int k) {
  return phase_prior_time(prior, k, memory_entry_phase, memory_box_time);
}

StrategyMatrix matrix_universal(int x_max, int k, int horizon) {
  check_phase_args(x_max, k, "matrix_universal");
  if (horizon < 0) throw std::invalid_argument("matrix_universal: horizon must be >= 0");
  StrategyMatrix N;
  N.survival.setOnes(x_max, horizon + 1);
  for (int x = 1; x <= x_max; ++x) {
    const int64_t s = universal_entry_phase(x, k);
    double v = 1.0;  // survival after the last completed phase
    for (int64_t t = s; 2 * t - 1 <= horizon; ++t) {
      N.survival(x - 1, 2 * t - 1) = v * universal_f1(t, k);
      v *= universal_f2(t, k);
      if (2 * t <= horizon) N.survival(x - 1, 2 * t) = v;
    }
  }
  N.tail_bound = phase_matrix_tail(universal_entry_phase(x_max, k), k, horizon,
                                   universal_f2, universal_tail_sum);
  return N;
}

StrategyMatrix matrix_memory(int x_max, int k, int horizon) {
  check_phase_args(x_max, k, "matrix_memory");
  if (horizon < 0) throw std::invalid_argument("matrix_memory: horizon must be >= 0");
  StrategyMatrix N;
  N.survival.setOnes(x_max, horizon + 1);
  for (int x = 1; x <= x_max; ++x) {
    const int64_t s = memory_entry_phase(x, k);
    double v = 1.0;
    for (int64_t t = s; 2 * t - 1 <= horizon; ++t) {
      N.survival(x - 1, 2 * t - 1) = v * memory_f1(t, k);
      v *= memory_f2(t, k);
      if (2 * t <= horizon) N.survival(x - 1, 2 * t) = v;
    }
  }
  N.tail_bound = phase_matrix_tail(memory_entry_phase(x_max, k), k, horizon,
                                   memory_f2, memory_tail_sum);
  return N;
}

int64_t pareto_window(int64_t t, double b, int k, int64_t M) {
  if (t < 1) return 0;
  const double raw = static_cast<double>(t) * (b + static_cast<double>(k) - 1.0) / b;
  const auto w = static_cast<int64_t>(std::floor(raw));
  return std::min(w, M);
}

int64_t pareto_first_step(int64_t x, double b, int k, int64_t M) {
  if (x < 1 || x > M) throw std::invalid_argument("pareto_first_step: box out of range");
  const double sigma = b / (b + static_cast<double>(k) - 1.0);
  auto t = static_cast<int64_t>(std::ceil(sigma * static_cast<double>(x)));
  if (t < 1) t = 1;
  while (pareto_window(t, b, k, M) < x) ++t;
  while (t > 1 && pareto_window(t - 1, b, k, M) >= x) --t;
  return t;
}

namespace {

void require_pareto_prior(const BoxPrior& prior, const char* who) {
  if (prior.kind != PriorKind::pareto)
    throw std::invalid_argument(std::string(who) + " is specialized to pareto priors");
}

// factor(t) = 1 - 1/(w_t - t + 1): survival of one unchecked in-window box
// through query t.  w_t >= t, so the unchecked count stays >= 1; it reaches
// exactly 1 at t = M, making the factor 0 and the matrix exhaustive.
double pareto_factor(int64_t t, double b, int k, int64_t M) {
  const double cnt = static_cast<double>(pareto_window(t, b, k, M) - t + 1);
  return 1.0 - 1.0 / cnt;
}

}  // namespace

StrategyMatrix matrix_pareto(const BoxPrior& prior, int k) {
  require_pareto_prior(prior, "matrix_pareto");
  if (k < 2) throw std::invalid_argument("matrix_pareto needs k >= 2");
  const int64_t M = prior.boxes();
  StrategyMatrix N;
  N.survival.setOnes(M, M + 1);
  for (int64_t x = 1; x <= M; ++x) {
    const int64_t t0 = pareto_first_step(x, prior.b, k, M);
    double v = 1.0;
    for (int64_t t = t0; t <= M; ++t) {
      v *= pareto_factor(t, prior.b, k, M);
      N.survival(x - 1, t) = v;
    }
  }
  return N;
}

double pareto_strategy_time(const BoxPrior& prior, int k) {
  require_pareto_prior(prior, "pareto_strategy_time");
  if (k < 2) throw std::invalid_argument("pareto_strategy_time needs k >= 2");
  const int64_t M = prior.boxes();

  // G[t] = survival product of a box active from step 1; every box's tail
  // is a ratio of these, so one cumulative array serves all rows.
  std::vector<double> G(M, 0.0);
  G[0] = 1.0;
  for (int64_t t = 1; t < M; ++t) G[t] = G[t - 1] * pareto_factor(t, prior.b, k, M);

  // suffix[t0] = sum_{t=t0..M-1} G[t]^k, accumulated backwards.
  std::vector<double> suffix(M + 1, 0.0);
  long double acc = 0.0L;
  for (int64_t t = M - 1; t >= 1; --t) {
    acc += ipow(G[t], k);
    suffix[t] = static_cast<double>(acc);
  }

  KahanSum total;
  for (int64_t x = 1; x <= M; ++x) {
    const int64_t t0 = pareto_first_step(x, prior.b, k, M);
    const double tx = static_cast<double>(t0) + suffix[t0] / ipow(G[t0 - 1], k);
    total.add(prior.masses(x - 1) * tx);
  }
  return total.value();
}

StrategyMatrix matrix_astar(const BoxPrior& prior, int k) {
  LSchedule s = build_L(prior, k);
  return std::move(s.L);
}

StrategyMatrix matrix_uniform_replacement(int M, int k, int horizon) {
  if (M < 1) throw std::invalid_argument("matrix_uniform_replacement: M must be >= 1");
  if (k < 1) throw std::invalid_argument("matrix_uniform_replacement: k must be >= 1");
  if (horizon < 0) throw std::invalid_argument("matrix_uniform_replacement: horizon must be >= 0");
  StrategyMatrix N;
  N.survival.setOnes(M, horizon + 1);
  const double r = 1.0 - 1.0 / static_cast<double>(M);
  double v = 1.0;
  for (int t = 1; t <= horizon; ++t) {
    v *= r;
    N.survival.col(t).setConstant(v);
  }
  const double rk = ipow(r, k);
  N.tail_bound = (M == 1) ? 0.0 : ipow(v, k) * rk / (1.0 - rk);
  return N;
}

StrategyMatrix matrix_uniform_norepl(int M) {
  if (M < 1) throw std::invalid_argument("matrix_uniform_norepl: M must be >= 1");
  StrategyMatrix N;
  N.survival.setOnes(M, M + 1);
  for (int t = 1; t <= M; ++t)
    N.survival.col(t).setConstant(static_cast<double>(M - t) / M);
  return N;
}

double uniform_replacement_time(int M, int k) {
  if (M < 1 || k < 1) throw std::invalid_argument("uniform_replacement_time: M, k must be >= 1");
  if (M == 1) return 1.0;
  const double rk = ipow(1.0 - 1.0 / static_cast<double>(M), k);
  return 1.0 / (1.0 - rk);
}

int64_t sample_cord(int agent_id, int64_t t, int k) {
  if (agent_id < 1 || agent_id > k) throw std::invalid_argument("sample_cord: agent_id out of range");
  if (t < 1) throw std::invalid_argument("sample_cord: t must be >= 1");
  return (t - 1) * static_cast<int64_t>(k) + agent_id;
}

StrategyContext make_context(StrategyKind kind, const BoxPrior& prior, int configured_k) {
  if (configured_k < 1) throw std::invalid_argument("make_context: k must be >= 1");
  StrategyContext ctx;
  ctx.kind = kind;
  ctx.k = configured_k;
  ctx.M = prior.boxes();
  switch (kind) {
    case StrategyKind::pareto:
      require_pareto_prior(prior, "make_context(pareto)");
      if (configured_k < 2) throw std::invalid_argument("pareto strategy needs k >= 2");
      ctx.b = prior.b;
      break;
    case StrategyKind::astar: {
      if (configured_k < 2) throw std::invalid_argument("astar strategy needs k >= 2");
      WaterSchedule ws = water_schedule(prior, configured_k);
      ctx.alpha = std::move(ws.alpha);
      ctx.active = std::move(ws.active);
      ctx.support = ws.support;
      ctx.q = q_weights(prior, configured_k).q;
      break;
    }
    default:
      break;
  }
  return ctx;
}

Searcher::Searcher(const StrategyContext& ctx, int agent_id)
    : ctx_(&ctx), agent_id_(agent_id), rng_(0, 0, 0) {
  if (agent_id < 1) throw std::invalid_argument("Searcher: agent_id must be >= 1");
}

void Searcher::reset(uint64_t seed, uint64_t trial) {
  rng_ = Philox(seed, trial, static_cast<uint32_t>(agent_id_));
  pool_.clear();
  appended_ = 0;
}

int64_t Searcher::step_pool_draw(int64_t window) {
  while (appended_ < window) pool_.push_back(++appended_);
  if (pool_.empty()) return 0;  // window exhausted; provably unreachable here
  const auto idx = static_cast<size_t>(rng_.next_below(pool_.size()));
  const int64_t box = pool_[idx];
  pool_[idx] = pool_.back();
  pool_.pop_back();
  return box;
}

int64_t Searcher::step_astar(int64_t t) {
  if (t > ctx_->support) return 0;  // schedule spent: every support box is checked
  const double a_now = ctx_->alpha(t);
  const double a_prev = ctx_->alpha(t - 1);  // +inf at t = 1
  const int64_t ac_now = ctx_->active(t);

  const auto n_prev = static_cast<double>(pool_.size());
  const double w_prev = pool_.empty() ? 0.0 : 1.0 - a_now / a_prev;

  new_w_.clear();
  KahanSum total;
  total.add(n_prev * w_prev);
  for (int64_t x = appended_ + 1; x <= ac_now; ++x) {
    new_w_.push_back(1.0 - a_now * ctx_->q(x - 1));
    total.add(new_w_.back());
  }
  const double tot = total.value();
  if (std::abs(tot - 1.0) > 1e-9)
    throw SolveError("astar step probabilities drifted from 1");

  double u = rng_.next_double() * tot;
  int64_t chosen = 0;

  if (u < n_prev * w_prev) {
    auto idx = static_cast<size_t>(u / w_prev);
    if (idx >= pool_.size()) idx = pool_.size() - 1;
    chosen = pool_[idx];
    pool_[idx] = pool_.back();
    pool_.pop_back();
    for (int64_t x = appended_ + 1; x <= ac_now; ++x) pool_.push_back(x);
  } else {
    u -= n_prev * w_prev;
    size_t last_positive = pool_.size();
    bool have_positive = false;
    for (int64_t x = appended_ + 1; x <= ac_now; ++x) {
      const double wx = new_w_[static_cast<size_t>(x - appended_ - 1)];
      if (chosen == 0) {
        if (u < wx) {
          chosen = x;
          continue;  // the checked box never enters the pool
        }
        u -= wx;
      }
      if (wx > 0.0) {
        last_positive = pool_.size();
        have_positive = true;
      }
      pool_.push_back(x);
    }
    if (chosen == 0) {
      // rounding pushed u past the last weight; take the final candidate
      size_t idx = have_positive ? last_positive : pool_.size() - 1;
      chosen = pool_[idx];
      pool_[idx] = pool_.back();
      pool_.pop_back();
    }
  }
  appended_ = std::max(appended_, ac_now);
  return chosen;
}

int64_t Searcher::sample_step(int64_t t) {
  if (t < 1) throw std::invalid_argument("sample_step: t must be >= 1");
  const int64_t phase = (t + 1) / 2;
  switch (ctx_->kind) {
    case StrategyKind::cord:
      return sample_cord(agent_id_, t, ctx_->k);
    case StrategyKind::uniform_replacement:
      return 1 + static_cast<int64_t>(rng_.next_below(static_cast<uint64_t>(ctx_->M)));
    case StrategyKind::memory:
      return 1 + static_cast<int64_t>(
                     rng_.next_below(static_cast<uint64_t>(ctx_->k) * phase));
    case StrategyKind::universal:
      return step_pool_draw(static_cast<int64_t>(ctx_->k + 1) * phase);
    case StrategyKind::pareto:
      return step_pool_draw(pareto_window(t, ctx_->b, ctx_->k, ctx_->M));
    case StrategyKind::astar:
      return step_astar(t);
  }
  throw std::logic_error("unhandled strategy kind");
}

CheckSequence trace_agent(const StrategyContext& ctx, int agent_id, uint64_t seed,
                          uint64_t trial, int64_t queries) {
  if (queries < 0) throw std::invalid_argument("trace_agent: queries must be >= 0");
  Searcher agent(ctx, agent_id);
  agent.reset(seed, trial);
  const bool paired =
      ctx.kind == StrategyKind::universal || ctx.kind == StrategyKind::memory;
  CheckSequence seq;
  seq.agent_id = agent_id;
  seq.seed = seed;
  seq.trial = trial;
  for (int64_t t = 1; t <= queries; ++t) {
    if (!paired || t % 2 == 1) seq.steps.emplace_back();
    const int64_t box = agent.sample_step(t);
    if (box != 0) seq.steps.back().push_back(box);
  }
  return seq;
}

}  // namespace boxsearch
