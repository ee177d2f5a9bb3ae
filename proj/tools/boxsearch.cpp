#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boxsearch/continuum.hpp"
#include "boxsearch/montecarlo.hpp"
#include "boxsearch/prior.hpp"
#include "boxsearch/report.hpp"
#include "boxsearch/searchers.hpp"
#include "boxsearch/strategy.hpp"
#include "boxsearch/verify.hpp"

namespace {

using namespace boxsearch;

constexpr uint64_t kDefaultSeed = 20260815ull;

struct GlobalOpts {
  std::string format = "csv";
  std::string out;
  int threads = 0;
  uint64_t seed = kDefaultSeed;
};

uint64_t resolve_seed(const CLI::Option* seed_opt, uint64_t cli_value) {
  if (seed_opt->count() > 0) return cli_value;
  if (const char* env = std::getenv("BOXSEARCH_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
    throw std::invalid_argument("BOXSEARCH_SEED is not an unsigned integer");
  }
  return kDefaultSeed;
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << text;
}

void emit(const Report& report, const GlobalOpts& g) {
  write_text(g.format == "json" ? to_json(report) : to_csv(report), g.out);
}

std::vector<CrashEvent> parse_crashes(const std::vector<std::string>& specs) {
  std::vector<CrashEvent> events;
  for (const std::string& s : specs) {
    const size_t colon = s.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("crash spec must be agent:time, got '" + s + "'");
    try {
      events.push_back({std::stoi(s.substr(0, colon)),
                        static_cast<int64_t>(std::stoll(s.substr(colon + 1)))});
    } catch (const std::logic_error&) {
      throw std::invalid_argument("crash spec must be agent:time, got '" + s + "'");
    }
  }
  return events;
}

nlohmann::json base_config(const char* command, const BoxPrior& prior, int k,
                           uint64_t seed) {
  nlohmann::json j;
  j["command"] = command;
  j["prior"] = prior_to_json(prior);
  j["k"] = k;
  j["seed"] = seed;
  return j;
}

int cmd_lstar(const std::string& prior_spec, int k, const std::string& dump,
              const GlobalOpts& g) {
  const BoxPrior prior = parse_prior_spec(prior_spec);
  const LSchedule L = build_L(prior, k);
  const double T = astar_exact_time(prior, k);
  const int M = prior.boxes();

  Report report;
  report.config = base_config("lstar", prior, k, g.seed);
  report.columns = {"t", "alpha", "active"};
  for (int t = 1; t <= M; ++t)
    report.rows.push_back(
        {static_cast<int64_t>(t), L.alpha(t), static_cast<int64_t>(L.active(t))});
  emit(report, g);

  if (!dump.empty()) {
    Report matrix;
    matrix.config = base_config("lstar-matrix", prior, k, g.seed);
    matrix.columns = {"x"};
    for (int t = 0; t <= M; ++t) matrix.columns.push_back("t=" + std::to_string(t));
    for (int x = 1; x <= M; ++x) {
      std::vector<Cell> row{static_cast<int64_t>(x)};
      for (int t = 0; t <= M; ++t) row.emplace_back(L.L.survival(x - 1, t));
      matrix.rows.push_back(std::move(row));
    }
    write_text(to_csv(matrix), dump);

    nlohmann::json side;
    side["prior"] = prior_to_json(prior);
    side["k"] = k;
    side["support"] = L.support;
    side["T"] = T;
    side["alpha"] = std::vector<double>(L.alpha.data() + 1, L.alpha.data() + M + 1);
    side["active"] = std::vector<int>(L.active.data() + 1, L.active.data() + M + 1);
    write_text(side.dump(2) + "\n", dump + ".json");
  }
  return 0;
}

int cmd_eval(const std::string& prior_spec, int k, std::vector<std::string> alg_names,
             const GlobalOpts& g) {
  const BoxPrior prior = parse_prior_spec(prior_spec);
  if (alg_names.empty()) {
    alg_names = {"cord", "astar", "universal", "memory", "uniform-replacement"};
    if (prior.kind == PriorKind::pareto) alg_names.push_back("pareto");
  }
  const double cord = cord_time(prior, k);

  Report report;
  report.config = base_config("eval", prior, k, g.seed);
  report.columns = {"strategy", "lower", "upper", "ratio_to_cord"};
  for (const std::string& name : alg_names) {
    TimeBracket T{0.0, 0.0};
    switch (parse_strategy(name)) {
      case StrategyKind::cord: T = {cord, cord}; break;
      case StrategyKind::astar: {
        const double v = astar_exact_time(prior, k);
        T = {v, v};
        break;
      }
      case StrategyKind::universal: T = universal_prior_time(prior, k); break;
      case StrategyKind::memory: T = memory_prior_time(prior, k); break;
      case StrategyKind::pareto: {
        const double v = pareto_strategy_time(prior, k);
        T = {v, v};
        break;
      }
      case StrategyKind::uniform_replacement: {
        const double v = uniform_replacement_time(prior.boxes(), k);
        T = {v, v};
        break;
      }
    }
    report.rows.push_back({name, T.lower, T.upper, T.mid() / cord});
  }
  emit(report, g);
  return 0;
}

int cmd_sim(const std::string& prior_spec, const std::string& alg, int k,
            int64_t trials, const std::vector<std::string>& crash_specs,
            int configured_k, const GlobalOpts& g) {
  SimConfig cfg;
  cfg.prior = parse_prior_spec(prior_spec);
  cfg.strategy = parse_strategy(alg);
  cfg.k = k;
  cfg.trials = trials;
  cfg.seed = g.seed;
  cfg.crash_schedule = parse_crashes(crash_specs);
  cfg.configured_k = configured_k;

  const SimOutcome o = run(cfg, g.threads);

  Report report;
  report.config = base_config("sim", cfg.prior, k, g.seed);
  report.config["strategy"] = alg;
  report.config["trials"] = trials;
  report.config["configured_k"] = configured_k == 0 ? k : configured_k;
  if (!cfg.crash_schedule.empty()) {
    nlohmann::json crashes = nlohmann::json::array();
    for (const CrashEvent& ev : cfg.crash_schedule)
      crashes.push_back({{"agent", ev.agent_id}, {"time", ev.time}});
    report.config["crash_schedule"] = crashes;
  }
  report.columns = {"trial", "treasure_box", "discovery_time"};
  for (int64_t trial = 0; trial < trials; ++trial)
    report.rows.push_back({trial, o.treasure_boxes[trial], o.discovery_times[trial]});
  emit(report, g);

  std::cerr << "mean " << format_double(o.mean) << ", stderr "
            << format_double(o.std_error) << ", censored " << o.censored
            << ", idle steps " << o.no_ops << "\n";
  return 0;
}

int cmd_trace(const std::string& prior_spec, const std::string& alg, int k, int agent,
              int64_t steps, uint64_t trial, const GlobalOpts& g) {
  const BoxPrior prior = parse_prior_spec(prior_spec);
  const StrategyContext ctx = make_context(parse_strategy(alg), prior, k);
  const CheckSequence seq = trace_agent(ctx, agent, g.seed, trial, steps);

  std::string out;
  nlohmann::json header = base_config("trace", prior, k, g.seed);
  header["strategy"] = alg;
  header["agent"] = agent;
  header["trial"] = trial;
  out += header.dump() + "\n";
  for (size_t i = 0; i < seq.steps.size(); ++i) {
    nlohmann::json line;
    line["step"] = i + 1;
    line["boxes"] = seq.steps[i];
    out += line.dump() + "\n";
  }
  write_text(out, g.out);
  return 0;
}

int cmd_theory_ratio(double b, int k, int64_t M, const GlobalOpts& g) {
  const ContinuumParams cp(b, k);
  Report report;
  report.config = {{"command", "theory-ratio"}, {"b", b}, {"k", k}};
  report.columns = {"b", "k", "sigma", "u_opt", "limit"};
  std::vector<Cell> row{b, static_cast<int64_t>(k), cp.sigma, u_opt(cp),
                        pareto_ratio_limit(cp)};
  if (M > 0) {
    report.config["M"] = M;
    report.columns.push_back("M");
    report.columns.push_back("measured_ratio");
    const BoxPrior prior = make_pareto(b, static_cast<int>(M));
    row.emplace_back(M);
    row.emplace_back(pareto_strategy_time(prior, k) / cord_time(prior, k));
  }
  report.rows.push_back(std::move(row));
  emit(report, g);
  return 0;
}

int cmd_verify(const std::string& suite, double b, int k, int64_t M, bool single,
               const GlobalOpts& g) {
  std::vector<Check> checks;
  if (suite == "gamma") {
    checks = verify_gamma();
  } else if (suite == "bounds") {
    checks = verify_bounds();
  } else if (suite == "optimality") {
    checks = verify_optimality(g.seed);
  } else if (suite == "pareto") {
    checks = single ? verify_pareto_single(b, k, M) : verify_pareto();
  } else if (suite == "montecarlo") {
    checks = verify_montecarlo(g.seed, g.threads);
  } else {
    checks = verify_all(g.seed, g.threads);
  }
  const int fails = print_checks(checks, std::cout);
  return fails > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact evaluation, simulation, and verification of parallel box-search strategies"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", g.out, "write the report to this file instead of stdout");
  app.add_option("--threads", g.threads, "worker threads, 0 = hardware count");
  uint64_t cli_seed = kDefaultSeed;
  const CLI::Option* seed_opt =
      app.add_option("--seed", cli_seed, "rng seed (default: BOXSEARCH_SEED env, else 20260815)");

  std::string prior_spec;
  int k = 2;
  std::string alg;
  std::vector<std::string> algs;

  auto* lstar = app.add_subcommand("lstar", "water-filling schedule; --dump writes the full matrix");
  std::string dump;
  lstar->add_option("--prior", prior_spec, "uniform:M | pareto:b,M | file:path")->required();
  lstar->add_option("-k,--agents", k, "agent count the schedule is built for");
  lstar->add_option("--dump", dump, "write the survival matrix CSV here (plus a .json side file)");
  lstar->fallthrough();

  auto* eval = app.add_subcommand("eval", "exact expected times and ratios to the coordinated baseline");
  eval->add_option("--prior", prior_spec, "uniform:M | pareto:b,M | file:path")->required();
  eval->add_option("-k,--agents", k, "agent count");
  eval->add_option("--alg", algs, "strategies to evaluate (default: all applicable)");
  eval->fallthrough();

  auto* sim = app.add_subcommand("sim", "Monte Carlo discovery times");
  int64_t trials = 0;
  std::vector<std::string> crash_specs;
  int configured_k = 0;
  sim->add_option("--prior", prior_spec, "uniform:M | pareto:b,M | file:path")->required();
  sim->add_option("--alg", alg, "strategy to sample")->required();
  sim->add_option("-k,--agents", k, "agent count");
  sim->add_option("--trials", trials, "number of trials")->required();
  sim->add_option("--crash", crash_specs, "crash an agent: agent:time (repeatable)");
  sim->add_option("--configured-k", configured_k,
                  "k the strategy is tuned for (0 = same as -k)");
  sim->fallthrough();

  auto* trace = app.add_subcommand("trace", "one agent's checked boxes as JSON lines");
  int agent = 1;
  int64_t steps = 20;
  uint64_t trial = 0;
  trace->add_option("--prior", prior_spec, "uniform:M | pareto:b,M | file:path")->required();
  trace->add_option("--alg", alg, "strategy to sample")->required();
  trace->add_option("-k,--agents", k, "agent count");
  trace->add_option("--agent", agent, "agent id to trace");
  trace->add_option("--steps", steps, "queries to trace");
  trace->add_option("--trial", trial, "trial index selecting the stream");
  trace->fallthrough();

  auto* theory = app.add_subcommand("theory", "continuum closed forms");
  auto* ratio = theory->add_subcommand("ratio", "asymptotic pareto ratio and components");
  double b = 0.5;
  int64_t M = 0;
  ratio->add_option("--b", b, "pareto exponent in (0,1]")->required();
  ratio->add_option("-k,--agents", k, "agent count");
  ratio->add_option("--M", M, "also measure the exact finite-M ratio");
  ratio->fallthrough();
  theory->require_subcommand(1);
  theory->fallthrough();

  auto* verify = app.add_subcommand("verify", "named check suites");
  std::string suite;
  verify->add_option("suite", suite, "gamma|bounds|optimality|pareto|montecarlo|all")
      ->required()
      ->check(CLI::IsMember({"gamma", "bounds", "optimality", "pareto", "montecarlo", "all"}));
  const CLI::Option* vb = verify->add_option("--b", b, "pareto suite: single-config exponent");
  verify->add_option("-k,--agents", k, "pareto suite: single-config agent count");
  const CLI::Option* vM = verify->add_option("--M", M, "pareto suite: single-config box count");
  verify->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    g.seed = resolve_seed(seed_opt, cli_seed);
    if (lstar->parsed()) return cmd_lstar(prior_spec, k, dump, g);
    if (eval->parsed()) return cmd_eval(prior_spec, k, algs, g);
    if (sim->parsed())
      return cmd_sim(prior_spec, alg, k, trials, crash_specs, configured_k, g);
    if (trace->parsed()) return cmd_trace(prior_spec, alg, k, agent, steps, trial, g);
    if (theory->parsed() && ratio->parsed()) return cmd_theory_ratio(b, k, M, g);
    if (verify->parsed())
      return cmd_verify(suite, b, k, M, vb->count() > 0 || vM->count() > 0, g);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
