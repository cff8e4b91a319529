#include "ptagame/pta_model.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace ptg {

std::string_view to_string(Player p) { return p == Player::Min ? "min" : "max"; }

Pta::Pta(ClockContext ctx, std::vector<Location> locations, std::vector<std::string> actions,
         std::vector<Edge> edges)
    : ctx_(std::move(ctx)),
      locations_(std::move(locations)),
      actions_(std::move(actions)),
      edges_(std::move(edges)),
      by_location_(locations_.size()) {
  if (locations_.empty()) throw ModelError("a PTA needs at least one location");
  std::set<std::string> names;
  for (const auto& l : locations_)
    if (!names.insert(l.name).second) throw ModelError("duplicate location '" + l.name + "'");
  std::set<std::string> action_names;
  for (const auto& a : actions_)
    if (!action_names.insert(a).second) throw ModelError("duplicate action '" + a + "'");
  std::set<std::pair<LocationId, ActionId>> seen;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (e.source >= locations_.size() || e.action >= actions_.size())
      throw ModelError("edge refers to an unknown location or action");
    if (!seen.emplace(e.source, e.action).second)
      throw ModelError("more than one edge for (" + locations_[e.source].name + ", " + actions_[e.action] +
                       ")");
    if (e.branches.empty()) throw ModelError("edge without branches");
    for (const auto& b : e.branches)
      if (b.target >= locations_.size()) throw ModelError("branch targets an unknown location");
    by_location_[e.source].push_back(i);
  }
  for (auto& list : by_location_)
    std::sort(list.begin(), list.end(),
              [&](std::size_t a, std::size_t b) { return edges_[a].action < edges_[b].action; });
}

const Edge* Pta::edge(LocationId l, ActionId a) const {
  for (std::size_t i : by_location_.at(l))
    if (edges_[i].action == a) return &edges_[i];
  return nullptr;
}

std::vector<const Edge*> Pta::edges_from(LocationId l) const {
  std::vector<const Edge*> out;
  for (std::size_t i : by_location_.at(l)) out.push_back(&edges_[i]);
  return out;
}

std::optional<LocationId> Pta::find_location(std::string_view name) const {
  for (LocationId l = 0; l < locations_.size(); ++l)
    if (locations_[l].name == name) return l;
  return std::nullopt;
}

std::optional<ActionId> Pta::find_action(std::string_view name) const {
  for (ActionId a = 0; a < actions_.size(); ++a)
    if (actions_[a] == name) return a;
  return std::nullopt;
}

bool Pta::is_timed_automaton() const {
  return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) {
    return e.branches.size() == 1 && e.branches.front().probability == 1;
  });
}

GameArena::GameArena(Pta pta, std::vector<Player> owners) : pta_(std::move(pta)), owners_(std::move(owners)) {
  if (owners_.size() != pta_.locations().size())
    throw ModelError("owner partition does not cover every location exactly once");
}

std::vector<LocationId> GameArena::min_locations() const {
  std::vector<LocationId> out;
  for (LocationId l = 0; l < owners_.size(); ++l)
    if (owners_[l] == Player::Min) out.push_back(l);
  return out;
}

std::vector<LocationId> GameArena::max_locations() const {
  std::vector<LocationId> out;
  for (LocationId l = 0; l < owners_.size(); ++l)
    if (owners_[l] == Player::Max) out.push_back(l);
  return out;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool constraint_in_bounds(const ClockContext& ctx, const ClockConstraint& cc) {
  return max_bound(cc) <= ctx.k();
}

// Regions reachable by elapsing from r while the invariant keeps holding.
std::vector<ClockRegion> regions_under_invariant(const ClockContext& ctx, const ClockRegion& r,
                                                 const ClockConstraint& inv) {
  std::vector<ClockRegion> out;
  for (auto& next : future_chain(ctx, r)) {
    if (!satisfies(ctx, next, inv)) break;
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace

bool entails_at_least_one(const ClockContext& ctx, const ClockConstraint& guard, ClockId c) {
  // Syntactic fast path.
  for (const auto& sc : guard.conjuncts) {
    const bool lower = sc.rel == Relation::GreaterEq || sc.rel == Relation::Equal;
    // also covers c - c' >= i, since c' >= 0
    if (sc.clock == c && sc.bound >= 1 && (lower || sc.rel == Relation::Greater)) return true;
  }
  // Exact check over all regions (every region satisfying the guard has c >= 1).
  const SimpleConstraint below_one{c, std::nullopt, Relation::Less, 1};
  for (const auto& r : enumerate_regions(ctx))
    if (satisfies(ctx, r, guard) && satisfies(ctx, r, below_one)) return false;
  return true;
}

NonZenoResult check_structural_nonzeno(const Pta& pta) {
  struct Arc {
    LocationId from, to;
    const Edge* edge;
    ClockSet resets;
  };
  std::vector<Arc> arcs;
  for (const auto& e : pta.edges())
    for (const auto& b : e.branches) arcs.push_back({e.source, b.target, &e, b.resets});
  const std::size_t n = pta.locations().size();
  std::vector<std::vector<std::size_t>> out(n);
  for (std::size_t i = 0; i < arcs.size(); ++i) out[arcs[i].from].push_back(i);

  const auto& ctx = pta.context();
  std::map<const Edge*, std::vector<bool>> lower_bounded;
  for (const auto& e : pta.edges()) {
    std::vector<bool> lb(ctx.size());
    for (ClockId c = 0; c < ctx.size(); ++c) lb[c] = entails_at_least_one(ctx, e.guard, c);
    lower_bounded[&e] = std::move(lb);
  }

  auto cycle_ok = [&](const std::vector<std::size_t>& path) {
    for (ClockId c = 0; c < ctx.size(); ++c) {
      bool reset = false, bounded = false;
      for (std::size_t i : path) {
        reset = reset || arcs[i].resets.contains(c);
        bounded = bounded || lower_bounded[arcs[i].edge][c];
      }
      if (reset && bounded) return true;
    }
    return false;
  };

  constexpr std::size_t kCycleLimit = 1'000'000;
  std::size_t cycles = 0;
  NonZenoResult result;
  std::vector<std::size_t> path;
  std::vector<bool> on_path(n, false);
  std::function<bool(LocationId, LocationId)> dfs = [&](LocationId start, LocationId v) -> bool {
    for (std::size_t i : out[v]) {
      const LocationId w = arcs[i].to;
      if (w < start) continue;
      path.push_back(i);
      if (w == start) {
        if (++cycles > kCycleLimit) throw ModelError("too many cycles for the structural non-Zeno check");
        if (!cycle_ok(path)) {
          result.ok = false;
          result.cycle.push_back(start);
          for (std::size_t j : path) result.cycle.push_back(arcs[j].to);
          return true;
        }
      } else if (!on_path[w]) {
        on_path[w] = true;
        if (dfs(start, w)) return true;
        on_path[w] = false;
      }
      path.pop_back();
    }
    return false;
  };
  for (LocationId s = 0; s < n; ++s) {
    std::fill(on_path.begin(), on_path.end(), false);
    on_path[s] = true;
    path.clear();
    if (dfs(s, s)) break;
  }
  return result;
}

ValidationReport validate(const GameArena& arena) {
  ValidationReport report;
  const Pta& pta = arena.pta();
  const auto& ctx = pta.context();
  auto add = [&](std::string code, std::string msg) {
    report.violations.push_back({std::move(code), std::move(msg)});
  };

  bool bounds_ok = true;
  auto check_bounds = [&](const ClockConstraint& cc, const std::string& where) {
    if (!constraint_in_bounds(ctx, cc)) {
      bounds_ok = false;
      add("bound", "bound " + std::to_string(max_bound(cc)) + " > k=" + std::to_string(ctx.k()) + " in " + where);
    }
  };
  for (const auto& l : pta.locations()) check_bounds(l.invariant, "invariant of " + l.name);
  for (const auto& e : pta.edges()) {
    const std::string where = "(" + pta.location(e.source).name + ", " + pta.actions()[e.action] + ")";
    check_bounds(e.guard, "guard of " + where);
    Rational sum = 0;
    for (const auto& b : e.branches) {
      if (b.probability <= 0)
        add("probability", "non-positive probability " + to_fraction_string(b.probability) + " in " + where);
      sum += b.probability;
    }
    if (sum != 1) add("probability", "sum=" + to_fraction_string(sum) + " != 1 in " + where);
  }
  if (!bounds_ok) return report;  // region-level checks need in-range bounds

  const auto regions = enumerate_regions(ctx);
  for (LocationId l = 0; l < pta.locations().size(); ++l) {
    const auto& loc = pta.location(l);
    for (const auto& r : regions) {
      if (!satisfies(ctx, r, loc.invariant)) continue;
      bool available = false;
      for (const Edge* e : pta.edges_from(l)) {
        for (const auto& later : regions_under_invariant(ctx, r, loc.invariant)) {
          if (!satisfies(ctx, later, e->guard)) continue;
          available = true;
          for (const auto& b : e->branches) {
            const auto target = reset_region(later, b.resets);
            if (!satisfies(ctx, target, pta.location(b.target).invariant))
              add("target-invariant", "branch of (" + loc.name + ", " + pta.actions()[e->action] + ") from region " +
                                          later.to_string(ctx) + " violates invariant of " +
                                          pta.location(b.target).name);
          }
        }
      }
      if (!available)
        add("no-action", "no action available in " + loc.name + " at region " + r.to_string(ctx));
    }
  }

  if (auto nz = check_structural_nonzeno(pta); !nz.ok) {
    std::string cyc;
    for (std::size_t i = 0; i < nz.cycle.size(); ++i) cyc += (i ? " -> " : "") + pta.location(nz.cycle[i]).name;
    add("zeno", "cycle without a reset clock bounded below by 1: " + cyc);
  }
  // Duplicate target-invariant findings are possible across source regions; keep the first.
  std::set<std::string> seen;
  std::erase_if(report.violations, [&](const Violation& v) { return !seen.insert(v.message).second; });
  return report;
}

// ---------------------------------------------------------------------------
// Semantics

bool is_valid_state(const GameArena& arena, const ConcreteState& s) {
  const auto& pta = arena.pta();
  return s.location < pta.locations().size() && s.valuation.size() == pta.context().size() &&
         satisfies(s.valuation, pta.location(s.location).invariant);
}

bool timed_action_allowed(const GameArena& arena, const ConcreteState& s, const TimedAction& ta) {
  const auto& pta = arena.pta();
  const auto& ctx = pta.context();
  if (ta.action >= pta.actions().size()) throw DomainError("unknown action id " + std::to_string(ta.action));
  if (ta.delay < 0) return false;
  const Edge* e = pta.edge(s.location, ta.action);
  if (!e) return false;
  for (ClockId c = 0; c < ctx.size(); ++c)
    if (s.valuation[c] + ta.delay > ctx.k()) return false;
  const auto arrival = s.valuation.elapse(ctx, ta.delay);
  const auto& inv = pta.location(s.location).invariant;
  // Walk the region chain from [nu] to [nu + t]; the invariant must hold on each.
  const auto last = region_of(ctx, arrival);
  bool reached = false;
  for (const auto& r : future_chain(ctx, region_of(ctx, s.valuation))) {
    if (!satisfies(ctx, r, inv)) return false;
    if (r == last) {
      reached = true;
      break;
    }
  }
  if (!reached) return false;
  return satisfies(arrival, e->guard);
}

StateDistribution concrete_step(const GameArena& arena, const ConcreteState& s, const TimedAction& ta) {
  if (!timed_action_allowed(arena, s, ta))
    throw PreconditionError("timed action (" + to_fraction_string(ta.delay) + ", " +
                            arena.pta().actions().at(ta.action) + ") not allowed");
  const auto& pta = arena.pta();
  const auto arrival = s.valuation.elapse(pta.context(), ta.delay);
  std::map<ConcreteState, Rational> mass;
  for (const auto& b : pta.edge(s.location, ta.action)->branches) {
    ConcreteState next{b.target, arrival.reset(b.resets)};
    if (!satisfies(next.valuation, pta.location(b.target).invariant))
      throw ModelError("successor violates the invariant of " + pta.location(b.target).name);
    mass[std::move(next)] += b.probability;
  }
  return {mass.begin(), mass.end()};
}

}  // namespace ptg
