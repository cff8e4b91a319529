#include "ptagame/simulation.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace ptg {

StrategyTable::StrategyTable(const GameArena& arena, SolveConfig cfg) : arena_(arena), cfg_(std::move(cfg)) {}

StrategyTable::StrategyTable(const Brg& brg, const PositionalStrategy& min, const PositionalStrategy& max,
                             SolveConfig cfg)
    : arena_(brg.arena()), cfg_(std::move(cfg)) {
  absorb(brg, min, max);
}

void StrategyTable::absorb(const Brg& g, const PositionalStrategy& min, const PositionalStrategy& max) const {
  const auto& ctx = arena_.context();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& s = g.state(i);
    if (region_of(ctx, s.valuation) != s.region) continue;
    const auto& strat = s.owner == Player::Min ? min : max;
    std::optional<BoundaryAction> act;
    if (const auto* a = strat.action(g, i)) act = *a;
    table_.try_emplace(Key{s.location, s.valuation}, std::move(act));
  }
}

std::optional<BoundaryAction> StrategyTable::choose(const ConcreteState& s) const {
  const Key key{s.location, s.valuation};
  {
    std::lock_guard lock(mu_);
    if (auto it = table_.find(key); it != table_.end()) return it->second;
  }
  if (arena_.pta().location(s.location).is_final) return std::nullopt;
  const Brg g = explore(arena_, s);
  const auto r = solve_exact(g, cfg_);
  std::lock_guard lock(mu_);
  ++roots_;
  absorb(g, r.min, r.max);
  return table_.at(key);
}

std::size_t StrategyTable::solved_roots() const {
  std::lock_guard lock(mu_);
  return roots_;
}

TimedAction concretize_action(const ConcretizedStrategy& strategy, const ConcreteState& s, std::size_t step) {
  const auto& arena = strategy.table->arena();
  const auto& ctx = arena.context();
  if (arena.owner(s.location) != strategy.player)
    throw PreconditionError("state is controlled by " + std::string(to_string(arena.owner(s.location))));
  const auto act = strategy.table->choose(s);
  if (!act) throw PreconditionError("strategy has no action at " + s.valuation.to_string(ctx));

  const Rational t0 = act->immediate ? Rational(0) : Rational(act->b - s.valuation[act->clock]);
  const auto iv = delays_into(ctx, s.valuation, act->target);
  if (!iv) throw std::logic_error("boundary action target is not in the future of the state");
  TimedAction ta{t0, act->action};
  if (!iv->contains(t0)) {
    Rational eps = strategy.epsilon;
    if (strategy.decaying) {
      Rational scale(1);
      for (std::size_t i = 0; i <= step; ++i) scale /= 2;
      eps *= scale;
    }
    eps = std::min(eps, Rational((iv->hi - iv->lo) / 2));
    ta.delay = act->kind == BoundaryKind::Supremum ? Rational(t0 - eps) : Rational(t0 + eps);
  }
  if (!timed_action_allowed(arena, s, ta)) throw std::logic_error("concretised action is not allowed");
  return ta;
}

std::size_t sample_branch(const StateDistribution& dist, std::mt19937_64& rng) {
  if (dist.empty()) throw PreconditionError("empty distribution");
  Integer den = 1;
  for (const auto& [s, p] : dist) den = boost::multiprecision::lcm(den, denominator(p));
  if (den > Integer(std::numeric_limits<std::uint64_t>::max()))
    throw DomainError("probability denominators exceed 64 bits");
  const Integer u = uniform_below(rng, den.convert_to<std::uint64_t>());
  Integer cum = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    cum += numerator(dist[i].second) * (den / denominator(dist[i].second));
    if (u < cum) return i;
  }
  return dist.size() - 1;
}

RunRecord simulate_run(const GameArena& arena, const ConcretizedStrategy& min, const ConcretizedStrategy& max,
                       const ConcreteState& s0, std::mt19937_64& rng, std::size_t step_cap, bool record_trace) {
  if (!is_valid_state(arena, s0)) throw PreconditionError("start state violates its location invariant");
  RunRecord rec;
  if (record_trace) rec.trace.emplace();
  ConcreteState s = s0;
  while (true) {
    if (arena.pta().location(s.location).is_final) {
      rec.reached_target = true;
      break;
    }
    if (rec.steps >= step_cap) break;
    const auto& strat = arena.owner(s.location) == Player::Min ? min : max;
    const TimedAction ta = concretize_action(strat, s, rec.steps);
    auto dist = concrete_step(arena, s, ta);
    const std::size_t i = sample_branch(dist, rng);
    if (rec.trace) rec.trace->push_back({s, ta, i});
    rec.total_time += ta.delay;
    ++rec.steps;
    s = std::move(dist[i].first);
  }
  return rec;
}

RunRecord simulate_run(const GameArena& arena, const ConcretizedStrategy& min, const ConcretizedStrategy& max,
                       const ConcreteState& s0, std::uint64_t seed, std::size_t step_cap, bool record_trace) {
  std::mt19937_64 rng(seed);
  return simulate_run(arena, min, max, s0, rng, step_cap, record_trace);
}

Estimate estimate_value(const GameArena& arena, const ConcretizedStrategy& min, const ConcretizedStrategy& max,
                        const ConcreteState& s0, std::size_t n_runs, std::uint64_t seed, const EstimateOptions& opts) {
  if (n_runs < 2) throw DomainError("at least two runs are needed for an estimate");
  struct Partial {
    Rational sum{0}, sum_sq{0};
    std::size_t reached = 0;
  };
  const unsigned n = std::max(1U, std::min<unsigned>(opts.threads, static_cast<unsigned>(n_runs)));
  std::vector<Partial> parts(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t i = w; i < n_runs; i += n) {
        auto rng = stream_for(seed, i);
        const auto rec = simulate_run(arena, min, max, s0, rng, opts.step_cap);
        if (!rec.reached_target) continue;
        parts[w].sum += rec.total_time;
        parts[w].sum_sq += rec.total_time * rec.total_time;
        ++parts[w].reached;
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (n == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  Partial total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
    total.reached += p.reached;
  }
  Estimate est;
  est.runs = n_runs;
  est.reached = total.reached;
  est.unreached_fraction = static_cast<double>(n_runs - total.reached) / static_cast<double>(n_runs);
  if (total.reached == 0) return est;
  const Rational m(total.reached);
  est.exact_mean = total.sum / m;
  est.mean = to_double(est.exact_mean);
  if (total.reached >= 2) {
    const Rational var = (total.sum_sq - m * est.exact_mean * est.exact_mean) / (m - 1);
    est.half_width = 1.96 * std::sqrt(to_double(var) / static_cast<double>(total.reached));
  }
  return est;
}

std::string format_trace(const GameArena& arena, const std::vector<TraceStep>& trace) {
  const auto& pta = arena.pta();
  std::ostringstream os;
  for (const auto& st : trace)
    os << pta.location(st.state.location).name << " " << st.state.valuation.to_string(pta.context()) << " | "
       << pta.actions()[st.action.action] << " after " << to_short_string(st.action.delay) << " | branch "
       << st.branch << "\n";
  return os.str();
}

}  // namespace ptg
