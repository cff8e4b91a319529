#include "ptagame/game_solver.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace ptg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool ext_less(const ExtendedRational& a, const ExtendedRational& b) {
  if (a.is_infinite()) return false;
  if (b.is_infinite()) return true;
  return a.value() < b.value();
}

ExtendedRational ext_abs_diff(const ExtendedRational& a, const ExtendedRational& b) {
  if (a.is_infinite() && b.is_infinite()) return Rational(0);
  if (a.is_infinite() || b.is_infinite()) return ExtendedRational::infinity();
  return Rational(abs(a.value() - b.value()));
}

// Strongly connected components, sinks first.
std::vector<std::vector<std::size_t>> sccs(std::size_t n, const std::vector<std::vector<std::size_t>>& adj,
                                           const std::vector<bool>& include) {
  std::vector<std::size_t> index(n, SIZE_MAX), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  std::size_t counter = 0;
  std::vector<std::pair<std::size_t, std::size_t>> work;  // (node, next edge)
  for (std::size_t root = 0; root < n; ++root) {
    if (!include[root] || index[root] != SIZE_MAX) continue;
    work.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!work.empty()) {
      auto& [v, e] = work.back();
      if (e < adj[v].size()) {
        const std::size_t w = adj[v][e++];
        if (!include[w]) continue;
        if (index[w] == SIZE_MAX) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          work.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::size_t done = v;
      work.pop_back();
      if (!work.empty()) low[work.back().first] = std::min(low[work.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

// Dense exact Gaussian elimination on an augmented m x (m+1) system.
std::vector<Rational> gauss(std::vector<std::vector<Rational>> a) {
  const std::size_t m = a.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    while (piv < m && a[piv][col] == 0) ++piv;
    if (piv == m) throw std::logic_error("singular system in exact evaluation");
    std::swap(a[piv], a[col]);
    const Rational inv = 1 / a[col][col];
    for (std::size_t j = col; j <= m; ++j) a[col][j] *= inv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational f = a[r][col];
      for (std::size_t j = col; j <= m; ++j)
        if (a[col][j] != 0) a[r][j] -= f * a[col][j];
    }
  }
  std::vector<Rational> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = a[i][m];
  return x;
}

struct Objective {
  Rational weight{1};  // 1 for reachability time, lambda when discounted
  bool zero_final = true;
  bool classify_infinite = true;

  bool active(const Brg& g, std::size_t s) const { return !(zero_final && g.state(s).is_final); }
};

const PositionalStrategy& owner_strategy(const Brg& g, std::size_t s, const PositionalStrategy& min,
                                         const PositionalStrategy& max) {
  return g.state(s).owner == Player::Min ? min : max;
}

std::size_t chosen(const Brg& g, std::size_t s, const PositionalStrategy& min, const PositionalStrategy& max) {
  const auto& strat = owner_strategy(g, s, min, max);
  if (s >= strat.choice.size() || !strat.choice[s] || *strat.choice[s] >= g.transitions(s).size())
    throw PreconditionError("strategy undefined at state " + std::to_string(s));
  return *strat.choice[s];
}

ExactValues evaluate_chain(const Brg& g, const PositionalStrategy& min, const PositionalStrategy& max,
                           const Objective& obj) {
  const std::size_t n = g.size();
  ExactValues v(n, Rational(0));
  std::vector<std::size_t> pick(n, SIZE_MAX);
  std::vector<std::vector<std::size_t>> adj(n);
  std::vector<bool> active(n, false);
  for (std::size_t s = 0; s < n; ++s) {
    if (!obj.active(g, s)) continue;
    active[s] = true;
    pick[s] = chosen(g, s, min, max);
    for (const auto& [t, p] : g.transitions(s)[pick[s]].successors) adj[s].push_back(t);
  }

  std::vector<bool> infinite(n, false);
  if (obj.classify_infinite) {
    std::vector<std::vector<std::size_t>> rev(n);
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t : adj[s]) rev[t].push_back(s);
    auto backward = [&](std::vector<bool> seed) {
      std::vector<std::size_t> todo;
      for (std::size_t s = 0; s < n; ++s)
        if (seed[s]) todo.push_back(s);
      while (!todo.empty()) {
        const std::size_t t = todo.back();
        todo.pop_back();
        for (std::size_t s : rev[t])
          if (!seed[s]) {
            seed[s] = true;
            todo.push_back(s);
          }
      }
      return seed;
    };
    std::vector<bool> target(n, false);
    for (std::size_t s = 0; s < n; ++s) target[s] = !active[s];
    const auto can_reach = backward(target);
    std::vector<bool> stuck(n, false);
    for (std::size_t s = 0; s < n; ++s) stuck[s] = !can_reach[s];
    infinite = backward(stuck);
    for (std::size_t s = 0; s < n; ++s)
      if (infinite[s]) {
        v[s] = ExtendedRational::infinity();
        active[s] = false;
      }
  }

  std::vector<std::size_t> local(n, SIZE_MAX);
  for (const auto& comp : sccs(n, adj, active)) {
    const std::size_t m = comp.size();
    for (std::size_t i = 0; i < m; ++i) local[comp[i]] = i;
    std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m + 1, Rational(0)));
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t s = comp[i];
      const auto& tr = g.transitions(s)[pick[s]];
      a[i][i] += 1;
      Rational rhs = tr.reward;
      for (const auto& [t, p] : tr.successors) {
        if (local[t] != SIZE_MAX)
          a[i][local[t]] -= obj.weight * p;
        else
          rhs += p * v[t].value();
      }
      a[i][m] = obj.weight * rhs;
    }
    const auto x = gauss(std::move(a));
    for (std::size_t i = 0; i < m; ++i) v[comp[i]] = x[i];
    for (std::size_t s : comp) local[s] = SIZE_MAX;
  }
  return v;
}

ExtendedRational q_exact(const Brg& g, std::size_t s, std::size_t ti, const ExactValues& v, const Rational& w) {
  const auto& tr = g.transitions(s)[ti];
  Rational sum = tr.reward;
  for (const auto& [t, p] : tr.successors) {
    if (v[t].is_infinite()) {
      if (w == 0) return Rational(0);
      return ExtendedRational::infinity();
    }
    sum += p * v[t].value();
  }
  return Rational(w * sum);
}

double q_approx(const Brg& g, std::size_t s, std::size_t ti, const ApproxValues& f, double w) {
  const auto& tr = g.transitions(s)[ti];
  double sum = to_double(tr.reward);
  for (const auto& [t, p] : tr.successors) sum += to_double(p) * f[t];
  return w * sum;
}

Certificate certify_impl(const Brg& g, const ExactValues& v, const Objective& obj) {
  Certificate cert;
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (!obj.active(g, s)) {
      if (!(v[s] == ExtendedRational(Rational(0))))
        cert.violations.push_back({s, std::nullopt, ext_abs_diff(v[s], Rational(0))});
      continue;
    }
    const auto& ts = g.transitions(s);
    if (ts.empty()) {
      cert.violations.push_back({s, std::nullopt, ExtendedRational::infinity()});
      continue;
    }
    const bool is_min = g.state(s).owner == Player::Min;
    std::size_t best = 0;
    ExtendedRational best_q = q_exact(g, s, 0, v, obj.weight);
    for (std::size_t i = 1; i < ts.size(); ++i) {
      auto q = q_exact(g, s, i, v, obj.weight);
      if (is_min ? ext_less(q, best_q) : ext_less(best_q, q)) {
        best = i;
        best_q = std::move(q);
      }
    }
    if (!(best_q == v[s])) cert.violations.push_back({s, best, ext_abs_diff(v[s], best_q)});
  }
  cert.ok = cert.violations.empty();
  return cert;
}

ApproxValues improve_impl(const Brg& g, const ApproxValues& f, const Objective& obj) {
  const double w = to_double(obj.weight);
  ApproxValues out(g.size(), 0.0);
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (!obj.active(g, s)) continue;
    const auto& ts = g.transitions(s);
    if (ts.empty()) throw ModelError("state " + std::to_string(s) + " has no boundary action");
    const bool is_min = g.state(s).owner == Player::Min;
    double best = is_min ? kInf : -kInf;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double q = q_approx(g, s, i, f, w);
      best = is_min ? std::min(best, q) : std::max(best, q);
    }
    out[s] = best;
  }
  return out;
}

std::pair<PositionalStrategy, PositionalStrategy> extract_impl(const Brg& g, const ApproxValues& f,
                                                               const Objective& obj) {
  const double w = to_double(obj.weight);
  PositionalStrategy min{Player::Min, std::vector<std::optional<std::size_t>>(g.size())};
  PositionalStrategy max{Player::Max, std::vector<std::optional<std::size_t>>(g.size())};
  for (std::size_t s = 0; s < g.size(); ++s) {
    const auto& ts = g.transitions(s);
    if (!obj.active(g, s) || ts.empty()) continue;
    const bool is_min = g.state(s).owner == Player::Min;
    std::vector<double> q(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) q[i] = q_approx(g, s, i, f, w);
    const double best = is_min ? *std::min_element(q.begin(), q.end()) : *std::max_element(q.begin(), q.end());
    const double tie = 1e-12 * std::max(1.0, std::abs(best));
    std::size_t pick = 0;
    while (std::abs(q[pick] - best) > tie) ++pick;
    (is_min ? min : max).choice[s] = pick;
  }
  return {std::move(min), std::move(max)};
}

std::pair<PositionalStrategy, PositionalStrategy> first_actions(const Brg& g, const Objective& obj) {
  PositionalStrategy min{Player::Min, std::vector<std::optional<std::size_t>>(g.size())};
  PositionalStrategy max{Player::Max, std::vector<std::optional<std::size_t>>(g.size())};
  for (std::size_t s = 0; s < g.size(); ++s)
    if (obj.active(g, s) && !g.transitions(s).empty())
      (g.state(s).owner == Player::Min ? min : max).choice[s] = 0;
  return {std::move(min), std::move(max)};
}

// Hoffman-Karp: the inner player best-responds by policy iteration, the outer
// player switches wherever it strictly improves.
ExactValues strategy_improvement(const Brg& g, PositionalStrategy& min, PositionalStrategy& max, SweepOrder order,
                                 const Objective& obj, std::size_t& rounds) {
  const Player outer = order == SweepOrder::MinFirst ? Player::Min : Player::Max;
  const Player inner = outer == Player::Min ? Player::Max : Player::Min;
  auto better = [](Player p, const ExtendedRational& a, const ExtendedRational& b) {
    return p == Player::Min ? ext_less(a, b) : ext_less(b, a);
  };
  auto switch_player = [&](Player p, const ExactValues& v) {
    bool changed = false;
    auto& strat = p == Player::Min ? min : max;
    for (std::size_t s = 0; s < g.size(); ++s) {
      if (!obj.active(g, s) || g.state(s).owner != p) continue;
      ExtendedRational best_q = v[s];
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < g.transitions(s).size(); ++i) {
        auto q = q_exact(g, s, i, v, obj.weight);
        if (better(p, q, best_q)) {
          best_q = std::move(q);
          best = i;
        }
      }
      if (best) {
        strat.choice[s] = *best;
        changed = true;
      }
    }
    return changed;
  };
  constexpr std::size_t kMaxRounds = 100'000;
  for (rounds = 0; rounds < kMaxRounds; ++rounds) {
    ExactValues v = evaluate_chain(g, min, max, obj);
    while (switch_player(inner, v)) v = evaluate_chain(g, min, max, obj);
    if (!switch_player(outer, v)) return v;
  }
  throw ConvergenceError("strategy improvement did not stabilise", 0);
}

Objective reach_objective() { return Objective{}; }

Objective discounted_objective(const Rational& lambda, DiscountMode mode) {
  if (lambda < 0 || lambda >= 1) throw DomainError("discount factor must lie in [0, 1), got " + to_fraction_string(lambda));
  return Objective{lambda, mode == DiscountMode::StopAtTarget, false};
}

}  // namespace

const BoundaryAction* PositionalStrategy::action(const Brg& brg, std::size_t s) const {
  if (s >= choice.size() || !choice[s]) return nullptr;
  return &brg.transitions(s).at(*choice[s]).action;
}

ReachCheck check_assumption_reach(const Brg& g) {
  const std::size_t n = g.size();
  ReachCheck rc;
  for (std::size_t s = 0; s < n; ++s)
    if (!g.state(s).is_final && g.transitions(s).empty()) rc.witness.push_back(s);
  if (!rc.witness.empty()) {
    rc.ok = false;
    rc.reason = "non-final states without boundary actions";
    return rc;
  }

  std::vector<bool> alive(n);
  std::vector<std::vector<std::size_t>> enabled(n);
  for (std::size_t s = 0; s < n; ++s) {
    alive[s] = !g.state(s).is_final;
    if (alive[s])
      for (std::size_t i = 0; i < g.transitions(s).size(); ++i) enabled[s].push_back(i);
  }
  std::vector<std::size_t> comp_of(n, SIZE_MAX);
  std::vector<std::vector<std::size_t>> comps;
  for (bool changed = true; changed;) {
    changed = false;
    auto prune = [&](auto keep) {
      for (std::size_t s = 0; s < n; ++s) {
        if (!alive[s]) continue;
        auto& en = enabled[s];
        const auto before = en.size();
        std::erase_if(en, [&](std::size_t i) {
          const auto& succ = g.transitions(s)[i].successors;
          return !std::all_of(succ.begin(), succ.end(), [&](const auto& sp) { return keep(s, sp.first); });
        });
        if (en.size() != before) changed = true;
        if (en.empty()) {
          alive[s] = false;
          changed = true;
        }
      }
    };
    prune([&](std::size_t, std::size_t t) { return alive[t]; });
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t s = 0; s < n; ++s)
      if (alive[s])
        for (std::size_t i : enabled[s])
          for (const auto& [t, p] : g.transitions(s)[i].successors) adj[s].push_back(t);
    comps = sccs(n, adj, alive);
    std::fill(comp_of.begin(), comp_of.end(), SIZE_MAX);
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (std::size_t s : comps[c]) comp_of[s] = c;
    prune([&](std::size_t s, std::size_t t) { return alive[t] && comp_of[t] == comp_of[s]; });
  }
  std::vector<std::size_t> best;
  for (const auto& c : comps) {
    std::vector<std::size_t> members;
    for (std::size_t s : c)
      if (alive[s]) members.push_back(s);
    if (!members.empty() && (best.empty() || members.front() < best.front())) best = members;
  }
  if (!best.empty()) {
    rc.ok = false;
    rc.witness = std::move(best);
    rc.reason = "end component avoiding the target";
  }
  return rc;
}

ApproxValues improve_step(const Brg& brg, const ApproxValues& f) { return improve_impl(brg, f, reach_objective()); }

namespace {

ViResult iterate(const Brg& g, const SolveConfig& cfg, const Objective& obj) {
  const double tol = to_double(cfg.tolerance);
  if (!(tol > 0)) throw DomainError("tolerance must be positive");
  const double w = to_double(obj.weight);
  ViResult r;
  r.values.assign(g.size(), 0.0);
  double prev = kInf;
  for (std::size_t it = 1; it <= cfg.max_iterations; ++it) {
    auto next = improve_impl(g, r.values, obj);
    double res = 0, scale = 1;
    for (std::size_t s = 0; s < g.size(); ++s) {
      res = std::max(res, std::abs(next[s] - r.values[s]));
      scale = std::max(scale, std::abs(next[s]));
    }
    r.values = std::move(next);
    r.iterations = it;
    r.residual = res;
    r.residuals.push_back(res);
    if (res == 0) return r;
    if (res <= tol) {
      // A known contraction factor (discounting) bounds the tail directly.
      const double q = obj.classify_infinite ? (prev < kInf ? res / prev : 1.0) : w;
      if (q < 1 && res * q / (1 - q) <= tol) return r;
      if (res <= 64 * std::numeric_limits<double>::epsilon() * scale) return r;
    }
    prev = res;
  }
  throw ConvergenceError("value iteration did not converge within " + std::to_string(cfg.max_iterations) +
                             " iterations",
                         r.residual);
}

}  // namespace

ViResult value_iterate(const Brg& brg, const SolveConfig& cfg) { return iterate(brg, cfg, reach_objective()); }

std::pair<PositionalStrategy, PositionalStrategy> extract_strategies(const Brg& brg, const ApproxValues& f) {
  return extract_impl(brg, f, reach_objective());
}

ExactValues evaluate_pair_exact(const Brg& brg, const PositionalStrategy& min, const PositionalStrategy& max) {
  return evaluate_chain(brg, min, max, reach_objective());
}

Certificate certify(const Brg& brg, const ExactValues& v) { return certify_impl(brg, v, reach_objective()); }

namespace {

SolveResult solve_with(const Brg& g, const SolveConfig& cfg, const Objective& obj) {
  SolveResult res;
  std::pair<PositionalStrategy, PositionalStrategy> strat;
  if (cfg.warm_start) {
    auto vi = iterate(g, cfg, obj);
    res.vi_iterations = vi.iterations;
    res.vi_residual = vi.residual;
    res.approx = std::move(vi.values);
    strat = extract_impl(g, res.approx, obj);
  } else {
    for (std::size_t s = 0; s < g.size(); ++s)
      if (obj.active(g, s) && g.transitions(s).empty())
        throw ModelError("state " + std::to_string(s) + " has no boundary action");
    strat = first_actions(g, obj);
  }
  res.min = std::move(strat.first);
  res.max = std::move(strat.second);
  res.values = strategy_improvement(g, res.min, res.max, cfg.sweep, obj, res.improvement_rounds);
  res.certificate = certify_impl(g, res.values, obj);
  return res;
}

}  // namespace

SolveResult solve_exact(const Brg& brg, const SolveConfig& cfg) {
  const auto rc = check_assumption_reach(brg);
  if (!rc.ok) throw AssumptionError(rc.reason, rc.witness);
  return solve_with(brg, cfg, reach_objective());
}

SolveResult solve_discounted(const Brg& brg, const SolveConfig& cfg) {
  return solve_with(brg, cfg, discounted_objective(cfg.lambda, cfg.discount_mode));
}

ExactValues evaluate_pair_discounted(const Brg& brg, const PositionalStrategy& min, const PositionalStrategy& max,
                                     const Rational& lambda, DiscountMode mode) {
  return evaluate_chain(brg, min, max, discounted_objective(lambda, mode));
}

Certificate certify_discounted(const Brg& brg, const ExactValues& v, const Rational& lambda, DiscountMode mode) {
  return certify_impl(brg, v, discounted_objective(lambda, mode));
}

// ---------------------------------------------------------------------------
// Simple forms

ExtendedRational SimpleForm::at(const ClockValuation& nu) const {
  switch (kind) {
    case Kind::Infinity: return ExtendedRational::infinity();
    case Kind::Constant: return Rational(e);
    case Kind::Slope: return Rational(Rational(e) - nu[clock]);
  }
  return ExtendedRational::infinity();
}

std::string SimpleForm::to_string(const ClockContext& ctx) const {
  switch (kind) {
    case Kind::Infinity: return "inf";
    case Kind::Constant: return e.str();
    case Kind::Slope: return e.str() + " - " + ctx.name(clock);
  }
  return "?";
}

ExtendedRational TaSolution::value(LocationId l, const ClockRegion& zeta, const ClockValuation& nu) const {
  return forms.at({l, zeta}).at(nu);
}

namespace {

// Same function on the closure of zeta, written with the first clock of its
// fractional block; clocks with zero fraction are constants there.
SimpleForm canonical(const ClockRegion& zeta, SimpleForm f) {
  if (f.kind != SimpleForm::Kind::Slope) return f;
  const auto blk = zeta.block_of(f.clock);
  if (blk == 0) return SimpleForm::constant(f.e - zeta.integer_part(f.clock));
  const ClockId first = zeta.blocks()[blk].front();
  return SimpleForm::slope(f.e - zeta.integer_part(f.clock) + zeta.integer_part(first), first);
}

struct TaMove {
  BoundaryAction action;
  std::size_t successor = 0;
  ClockSet resets;
};

SimpleForm compose(const TaMove& mv, const SimpleForm& g) {
  const auto& act = mv.action;
  switch (g.kind) {
    case SimpleForm::Kind::Infinity: return g;
    case SimpleForm::Kind::Constant:
      return act.immediate ? g : SimpleForm::slope(g.e + act.b, act.clock);
    case SimpleForm::Kind::Slope:
      if (mv.resets.contains(g.clock))
        return act.immediate ? SimpleForm::constant(g.e) : SimpleForm::slope(g.e + act.b, act.clock);
      return g;
  }
  return g;
}

}  // namespace

TaSolution solve_ta_simple(const GameArena& arena, std::size_t max_iterations) {
  const auto& pta = arena.pta();
  const auto& ctx = pta.context();
  if (!pta.is_timed_automaton()) throw PreconditionError("solve_ta_simple needs point distributions on every edge");

  std::vector<RegionKey> keys;
  std::map<RegionKey, std::size_t> index;
  const auto regions = enumerate_regions(ctx);
  for (LocationId l = 0; l < pta.locations().size(); ++l)
    for (const auto& r : regions)
      if (satisfies(ctx, r, pta.location(l).invariant)) {
        index.emplace(RegionKey{l, r}, keys.size());
        keys.emplace_back(l, r);
      }

  std::vector<std::vector<TaMove>> moves(keys.size());
  std::vector<ClockValuation> reps;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto& [l, r] = keys[i];
    reps.push_back(representative(ctx, r));
    if (pta.location(l).is_final) continue;
    for (const auto& act : boundary_actions(arena, l, r)) {
      const auto& br = pta.edge(l, act.action)->branches.front();
      const auto it = index.find({br.target, reset_region(act.target, br.resets)});
      if (it == index.end()) throw ModelError("branch leaves the target invariant");
      moves[i].push_back({act, it->second, br.resets});
    }
  }

  std::vector<SimpleForm> cur(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i)
    cur[i] = pta.location(keys[i].first).is_final ? SimpleForm::constant(0) : SimpleForm::infinity();

  TaSolution sol;
  for (sol.iterations = 1; sol.iterations <= max_iterations; ++sol.iterations) {
    std::vector<SimpleForm> next = cur;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (moves[i].empty()) continue;
      const bool is_min = arena.owner(keys[i].first) == Player::Min;
      std::optional<SimpleForm> best;
      ExtendedRational best_v;
      for (const auto& mv : moves[i]) {
        auto f = canonical(keys[i].second, compose(mv, cur[mv.successor]));
        auto val = f.at(reps[i]);
        if (!best || (is_min ? ext_less(val, best_v) : ext_less(best_v, val))) {
          best = std::move(f);
          best_v = std::move(val);
        }
      }
      next[i] = *best;
    }
    if (next == cur) {
      for (std::size_t i = 0; i < keys.size(); ++i) sol.forms.emplace(keys[i], cur[i]);
      return sol;
    }
    cur = std::move(next);
  }
  throw ConvergenceError("simple-function iteration did not terminate", 0);
}

std::string dump_solution(const Brg& g, const SolveResult& r) {
  using nlohmann::json;
  const auto& pta = g.arena().pta();
  const auto& ctx = g.context();
  json doc;
  json states = json::array();
  for (std::size_t s = 0; s < g.size(); ++s) {
    const auto& st = g.state(s);
    json entry{{"id", s},
               {"location", pta.location(st.location).name},
               {"valuation", st.valuation.to_string(ctx)},
               {"region", st.region.to_string(ctx)},
               {"owner", std::string(to_string(st.owner))},
               {"final", st.is_final}};
    const auto& v = r.values[s];
    entry["value"] = v.to_string();
    entry["value_decimal"] = v.is_infinite() ? std::string("inf") : to_decimal_string(v.value());
    const auto& strat = st.owner == Player::Min ? r.min : r.max;
    if (const auto* a = strat.action(g, s))
      entry["strategy"] = {{"action", pta.actions()[a->action]},
                           {"b", a->b},
                           {"clock", ctx.name(a->clock)},
                           {"target", a->target.to_string(ctx)},
                           {"kind", std::string(to_string(a->kind))}};
    states.push_back(std::move(entry));
  }
  doc["initial_value"] = r.values[g.initial()].to_string();
  doc["initial_value_decimal"] =
      r.values[g.initial()].is_infinite() ? std::string("inf") : to_decimal_string(r.values[g.initial()].value());
  doc["certificate"] = r.certificate.ok;
  doc["violations"] = r.certificate.violations.size();
  doc["vi_iterations"] = r.vi_iterations;
  doc["vi_residual"] = r.vi_residual;
  doc["improvement_rounds"] = r.improvement_rounds;
  doc["states"] = std::move(states);
  return doc.dump(2);
}

}  // namespace ptg
