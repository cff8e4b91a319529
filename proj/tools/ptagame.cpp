// ptagame: validate, explore, solve and simulate expected-time games on
// probabilistic timed automata.

#include "CLI11.hpp"
#include "json.hpp"

#include "ptagame/model_io.hpp"
#include "ptagame/quasi_simple.hpp"
#include "ptagame/simulation.hpp"

#include <fstream>
#include <iostream>
#include <thread>

using nlohmann::json;
using namespace ptg;

namespace {

enum Exit : int { kOk = 0, kFailed = 1, kInput = 2, kAssumption = 3, kConvergence = 4 };

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Rational rational_flag(const std::string& name, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const DomainError& e) {
    throw InputError("--" + name + ": " + e.what());
  }
}

Model load_checked(const std::string& path) {
  Model m = [&] {
    try {
      return load_model(path);
    } catch (const ParseError& e) {
      throw InputError(e.what());
    }
  }();
  const auto rep = validate_model(m);
  if (!rep.ok()) {
    std::string msg = "model is invalid:";
    for (const auto& v : rep.violations) msg += "\n  [" + v.code + "] " + v.message;
    throw InputError(msg);
  }
  return m;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw InputError("cannot write " + out_path);
  f << text << "\n";
}

json state_json(const Brg& g, std::size_t s) {
  const auto& st = g.state(s);
  const auto& ctx = g.context();
  return {{"id", s},
          {"location", g.arena().pta().location(st.location).name},
          {"valuation", st.valuation.to_string(ctx)},
          {"region", st.region.to_string(ctx)}};
}

json action_json(const Brg& g, const BoundaryAction& a) {
  const auto& ctx = g.context();
  return {{"action", g.arena().pta().actions()[a.action]},
          {"b", a.b},
          {"clock", ctx.name(a.clock)},
          {"target", a.target.to_string(ctx)},
          {"kind", std::string(to_string(a.kind))}};
}

std::string assumption_document(const Brg& g, const AssumptionError& e) {
  json w = json::array();
  for (std::size_t s : e.witness()) w.push_back(state_json(g, s));
  return json{{"error", "assumption"}, {"reason", e.what()}, {"witness", w}}.dump(2);
}

unsigned thread_count(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1U, std::thread::hardware_concurrency());
}

struct Options {
  std::string model;
  std::string out;
  std::string dot;
  std::string tolerance = "1/1000000000";
  std::string epsilon;
  std::string lambda;
  std::string mode = "stop";
  std::string sweep = "min-first";
  std::string k_bound;
  std::string trace;
  std::size_t max_iterations = 1'000'000;
  std::size_t max_states = 2'000'000;
  std::size_t pairs = 200;
  std::size_t grid = 9;
  std::size_t step_cap = 10'000;
  long long runs = 10'000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool exact = false;
  bool decaying = false;
};

SolveConfig solve_config(const Options& o) {
  SolveConfig cfg;
  cfg.tolerance = rational_flag("tolerance", o.tolerance);
  if (!o.epsilon.empty()) cfg.epsilon = rational_flag("epsilon", o.epsilon);
  cfg.max_iterations = o.max_iterations;
  if (o.sweep == "max-first") cfg.sweep = SweepOrder::MaxFirst;
  if (cfg.tolerance <= 0) throw InputError("--tolerance must be positive");
  return cfg;
}

Brg explore_model(const Model& m, const Options& o) {
  ExploreOptions eo;
  eo.max_states = o.max_states;
  return explore(m.arena, m.initial, eo);
}

int cmd_validate(const Options& o) {
  Model m = [&] {
    try {
      return load_model(o.model);
    } catch (const ParseError& e) {
      throw InputError(e.what());
    }
  }();
  const auto rep = validate_model(m);
  json v = json::array();
  for (const auto& x : rep.violations) v.push_back({{"code", x.code}, {"message", x.message}});
  emit(json{{"model", m.name}, {"ok", rep.ok()}, {"violations", v}}.dump(2), o.out);
  return rep.ok() ? kOk : kInput;
}

int cmd_brg(const Options& o) {
  const Model m = load_checked(o.model);
  const Brg g = explore_model(m, o);
  if (!o.dot.empty()) {
    std::ofstream f(o.dot);
    if (!f) throw InputError("cannot write " + o.dot);
    f << export_dot(g);
  }
  if (!o.out.empty()) emit(dump_brg(g), o.out);
  std::cout << "states=" << g.size() << " transitions=" << g.transition_count()
            << " bound=" << Brg::finiteness_bound(g.arena()) << "\n";
  return kOk;
}

int cmd_solve(const Options& o) {
  const Model m = load_checked(o.model);
  const SolveConfig cfg = solve_config(o);
  const Brg g = explore_model(m, o);
  try {
    if (o.exact) {
      const auto r = solve_exact(g, cfg);
      emit(dump_solution(g, r), o.out);
      return r.certificate.ok ? kOk : kFailed;
    }
    const auto rc = check_assumption_reach(g);
    if (!rc.ok) throw AssumptionError(rc.reason, rc.witness);
    const auto vi = value_iterate(g, cfg);
    const auto [min, max] = extract_strategies(g, vi.values);
    json states = json::array();
    for (std::size_t s = 0; s < g.size(); ++s) {
      auto entry = state_json(g, s);
      entry["value_decimal"] = vi.values[s];
      const auto& strat = g.state(s).owner == Player::Min ? min : max;
      if (const auto* a = strat.action(g, s)) entry["strategy"] = action_json(g, *a);
      states.push_back(std::move(entry));
    }
    json doc{{"mode", "approximate"},
             {"initial_value_decimal", vi.values[g.initial()]},
             {"vi_iterations", vi.iterations},
             {"vi_residual", vi.residual},
             {"states", states}};
    emit(doc.dump(2), o.out);
    return kOk;
  } catch (const AssumptionError& e) {
    std::cout << assumption_document(g, e) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return kAssumption;
  }
}

int cmd_discounted(const Options& o) {
  const Model m = load_checked(o.model);
  SolveConfig cfg = solve_config(o);
  cfg.lambda = rational_flag("lambda", o.lambda);
  if (cfg.lambda < 0 || cfg.lambda >= 1) throw InputError("--lambda must satisfy 0 <= lambda < 1");
  cfg.discount_mode = o.mode == "infinite" ? DiscountMode::InfiniteHorizon : DiscountMode::StopAtTarget;
  const Brg g = explore_model(m, o);
  const auto r = solve_discounted(g, cfg);
  auto doc = json::parse(dump_solution(g, r));
  doc["lambda"] = to_fraction_string(cfg.lambda);
  doc["mode"] = o.mode;
  emit(doc.dump(2), o.out);
  return r.certificate.ok ? kOk : kFailed;
}

json witness_json(const ClockContext& ctx, const PairWitness& w) {
  return {{"nu", w.nu.to_string(ctx)},
          {"nu2", w.nu2.to_string(ctx)},
          {"f_nu", to_fraction_string(w.f_nu)},
          {"f_nu2", to_fraction_string(w.f_nu2)}};
}

int cmd_check_properties(const Options& o) {
  const Model m = load_checked(o.model);
  const auto& ctx = m.arena.context();
  const Brg g = explore_model(m, o);
  const auto rc = check_assumption_reach(g);
  if (!rc.ok) {
    std::cout << assumption_document(g, AssumptionError(rc.reason, rc.witness)) << "\n";
    std::cerr << "error: " << rc.reason << "\n";
    return kAssumption;
  }
  ValueOracle oracle(m.arena, solve_config(o));
  QuasiSimpleOptions qo;
  qo.pair_count = o.pairs;
  qo.seed = o.seed;
  qo.threads = thread_count(o.threads);
  if (!o.k_bound.empty()) qo.k_bound = rational_flag("K", o.k_bound);

  bool all = true;
  json regions = json::array();
  for (const auto& [l, r] : reachable_regions(g)) {
    const auto rep = check_quasi_simple(oracle, l, r, qo);
    all = all && rep.passed();
    json entry{{"location", m.arena.pta().location(l).name},
               {"region", r.to_string(ctx)},
               {"passed", rep.passed()},
               {"lipschitz_estimate", to_fraction_string(rep.lipschitz_estimate)},
               {"samples_checked", rep.samples_checked}};
    for (const auto& [key, list] : {std::pair{"lipschitz_violations", &rep.lipschitz_violations},
                                    std::pair{"monotonicity_violations", &rep.monotonicity_violations},
                                    std::pair{"nonexpansive_violations", &rep.nonexpansive_violations}}) {
      json arr = json::array();
      for (std::size_t i = 0; i < list->size() && i < 5; ++i) arr.push_back(witness_json(ctx, (*list)[i]));
      entry[key] = {{"count", list->size()}, {"examples", arr}};
    }
    regions.push_back(std::move(entry));
  }

  json monotone = json::array();
  for (std::size_t s = 0; s < g.size(); ++s) {
    const auto& st = g.state(s);
    if (st.is_final || region_of(ctx, st.valuation) != st.region) continue;
    const ConcreteState cs{st.location, st.valuation};
    for (const auto& t : g.transitions(s)) {
      const auto rep = check_time_monotone(oracle, cs, t.action.action, t.action.target, o.grid);
      all = all && rep.nondecreasing;
      monotone.push_back({{"state", state_json(g, s)},
                          {"action", m.arena.pta().actions()[t.action.action]},
                          {"target", t.action.target.to_string(ctx)},
                          {"nondecreasing", rep.nondecreasing},
                          {"points", rep.samples.size()}});
    }
  }
  emit(json{{"model", m.name}, {"passed", all}, {"regions", regions}, {"time_monotone", monotone}}.dump(2), o.out);
  return all ? kOk : kFailed;
}

int cmd_simulate(const Options& o) {
  if (o.runs < 2) throw InputError("--runs must be at least 2");
  const Model m = load_checked(o.model);
  const Brg g = explore_model(m, o);
  const SolveConfig cfg = solve_config(o);
  try {
    const auto r = solve_exact(g, cfg);
    const Rational eps = o.epsilon.empty() ? Rational(1, 1000) : rational_flag("epsilon", o.epsilon);
    if (eps <= 0) throw InputError("--epsilon must be positive");
    auto table = std::make_shared<const StrategyTable>(g, r.min, r.max, cfg);
    const ConcretizedStrategy min{table, Player::Min, eps, o.decaying};
    const ConcretizedStrategy max{table, Player::Max, eps, o.decaying};
    EstimateOptions eo;
    eo.step_cap = o.step_cap;
    eo.threads = thread_count(o.threads);
    const auto est = estimate_value(m.arena, min, max, m.initial, static_cast<std::size_t>(o.runs), o.seed, eo);
    if (!o.trace.empty()) {
      auto rng = stream_for(o.seed, 0);  // the stream of run 0
      const auto rec = simulate_run(m.arena, min, max, m.initial, rng, o.step_cap, true);
      std::ofstream f(o.trace);
      if (!f) throw InputError("cannot write " + o.trace);
      f << format_trace(m.arena, *rec.trace);
    }
    const auto& v = r.values[g.initial()];
    json doc{{"runs", est.runs},
             {"seed", o.seed},
             {"epsilon", to_fraction_string(eps)},
             {"mean", est.mean},
             {"half_width_95", est.half_width},
             {"reached", est.reached},
             {"unreached_fraction", est.unreached_fraction},
             {"certified_value", v.to_string()},
             {"certified_value_decimal", to_decimal_string(v.value())}};
    emit(doc.dump(2), o.out);
    return kOk;
  } catch (const AssumptionError& e) {
    std::cout << assumption_document(g, e) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return kAssumption;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expected reachability-time games on probabilistic timed automata"};
  app.require_subcommand(1);
  Options o;

  auto model_arg = [&](CLI::App* sub) { sub->add_option("model", o.model, "Model file (JSON)")->required(); };
  auto out_arg = [&](CLI::App* sub) { sub->add_option("--out", o.out, "Write the result document here"); };
  auto solver_args = [&](CLI::App* sub) {
    sub->add_option("--tolerance", o.tolerance, "Value iteration tolerance (rational)");
    sub->add_option("--epsilon", o.epsilon, "Tie and stopping epsilon (rational)");
    sub->add_option("--max-iterations", o.max_iterations, "Value iteration limit");
    sub->add_option("--sweep", o.sweep, "Strategy improvement order")->check(CLI::IsMember({"min-first", "max-first"}));
    sub->add_option("--max-states", o.max_states, "Exploration cap");
  };

  auto* validate = app.add_subcommand("validate", "Parse and check a model");
  model_arg(validate);
  out_arg(validate);

  auto* brg = app.add_subcommand("brg", "Explore the boundary region graph");
  model_arg(brg);
  out_arg(brg);
  brg->add_option("--dot", o.dot, "Write a DOT rendering");
  brg->add_option("--max-states", o.max_states, "Exploration cap");

  auto* solve = app.add_subcommand("solve", "Solve the expected reachability-time game");
  model_arg(solve);
  out_arg(solve);
  solver_args(solve);
  solve->add_flag("--exact", o.exact, "Certify exact rational values");

  auto* disc = app.add_subcommand("discounted", "Solve the expected discounted-time game");
  model_arg(disc);
  out_arg(disc);
  solver_args(disc);
  disc->add_option("--lambda", o.lambda, "Discount factor num/den in [0,1)")->required();
  disc->add_option("--mode", o.mode, "stop: final states are worth 0; infinite: play continues")
      ->check(CLI::IsMember({"stop", "infinite"}));

  auto* props = app.add_subcommand("check-properties", "Sampled structural checks of the value function");
  model_arg(props);
  out_arg(props);
  solver_args(props);
  props->add_option("--pairs", o.pairs, "Sample pairs per region and kind");
  props->add_option("--grid", o.grid, "Delays per time-monotonicity check");
  props->add_option("--K", o.k_bound, "Lipschitz bound (default 1 + number of clocks)");
  props->add_option("--seed", o.seed, "Sampling seed");
  props->add_option("--threads", o.threads, "Worker threads (0 = all cores)");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimate under the computed strategies");
  model_arg(sim);
  out_arg(sim);
  solver_args(sim);
  sim->add_option("--runs", o.runs, "Number of runs (>= 2)");
  sim->add_option("--seed", o.seed, "Base seed");
  sim->add_option("--step-cap", o.step_cap, "Steps before a run is abandoned");
  sim->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  sim->add_flag("--decaying", o.decaying, "Nudge by epsilon/2^(n+1) at step n");
  sim->add_option("--trace", o.trace, "Write the trace of one run here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*validate) return cmd_validate(o);
    if (*brg) return cmd_brg(o);
    if (*solve) return cmd_solve(o);
    if (*disc) return cmd_discounted(o);
    if (*props) return cmd_check_properties(o);
    if (*sim) return cmd_simulate(o);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const ConvergenceError& e) {
    std::cout << json{{"error", "convergence"}, {"reason", e.what()}, {"residual", e.residual()}}.dump(2) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return kConvergence;
  } catch (const AssumptionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAssumption;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kFailed;
}
