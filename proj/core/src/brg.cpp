#include "ptagame/brg.hpp"

#include "json.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace ptg {

std::string_view to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::Thin: return "thin";
    case BoundaryKind::Infimum: return "inf";
    case BoundaryKind::Supremum: return "sup";
  }
  return "?";
}

std::vector<BoundaryAction> boundary_actions(const GameArena& arena, LocationId l, const ClockRegion& zeta) {
  const auto& pta = arena.pta();
  const auto& ctx = pta.context();
  const auto& inv = pta.location(l).invariant;
  if (!satisfies(ctx, zeta, inv))
    throw PreconditionError("region " + zeta.to_string(ctx) + " violates the invariant of " + pta.location(l).name);

  std::vector<ClockRegion> chain;
  for (auto& r : future_chain(ctx, zeta)) {
    if (!satisfies(ctx, r, inv)) break;
    chain.push_back(std::move(r));
  }

  // Targets are ordered by when time reaches them, not by region value.
  std::vector<std::pair<BoundaryAction, std::size_t>> out;
  std::size_t pos = 0;
  auto emit = [&](BoundaryPoint bc, ActionId a, const ClockRegion& target, BoundaryKind kind, bool immediate) {
    out.emplace_back(BoundaryAction{bc.b, bc.clock, a, target, kind, immediate}, pos);
  };
  for (const Edge* e : pta.edges_from(l)) {
    for (std::size_t i = 0; i < chain.size(); ++i) {
      const auto& r = chain[i];
      pos = i;
      if (!satisfies(ctx, r, e->guard)) continue;
      if (is_thin(r)) {
        emit(*boundary_coordinates(ctx, zeta, r), e->action, r, BoundaryKind::Thin, false);
        continue;
      }
      if (i == 0) {
        const ClockId c = *std::min_element(r.blocks()[1].begin(), r.blocks()[1].end());
        emit({r.integer_part(c), c}, e->action, r, BoundaryKind::Infimum, true);
      } else {
        emit(*boundary_coordinates(ctx, zeta, chain[i - 1]), e->action, r, BoundaryKind::Infimum, false);
      }
      const auto next = time_successor(ctx, r);
      emit(*boundary_coordinates(ctx, zeta, *next), e->action, r, BoundaryKind::Supremum, false);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    const auto& [p, i] = x;
    const auto& [q, j] = y;
    return std::tie(p.action, p.b, p.clock, i, p.kind) < std::tie(q.action, q.b, q.clock, j, q.kind);
  });
  std::vector<BoundaryAction> acts;
  for (auto& [a, i] : out)
    if (acts.empty() || acts.back().key() != a.key()) acts.push_back(std::move(a));
  return acts;
}

Rational reward(const BrgState& s, const BoundaryAction& act) {
  if (act.immediate) return 0;
  Rational r = Rational(act.b) - s.valuation[act.clock];
  if (r < 0) throw std::logic_error("negative boundary reward");
  return r;
}

ClockValuation firing_valuation(const ClockContext& ctx, const BrgState& s, const BoundaryAction& act) {
  if (act.immediate) return s.valuation;
  return s.valuation.elapse(ctx, reward(s, act));
}

std::vector<std::pair<BrgState, Rational>> transition_distribution(const GameArena& arena, const BrgState& s,
                                                                   const BoundaryAction& act) {
  const auto& pta = arena.pta();
  const Edge* e = pta.edge(s.location, act.action);
  if (!e) throw PreconditionError("action not available in location " + pta.location(s.location).name);
  const auto nu_a = firing_valuation(pta.context(), s, act);
  std::vector<std::pair<BrgState, Rational>> out;
  for (const auto& br : e->branches) {
    BrgState next{br.target, nu_a.reset(br.resets), reset_region(act.target, br.resets), arena.owner(br.target),
                  pta.location(br.target).is_final};
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == next; });
    if (it == out.end())
      out.emplace_back(std::move(next), br.probability);
    else
      it->second += br.probability;
  }
  return out;
}

std::size_t Brg::transition_count() const {
  std::size_t n = 0;
  for (const auto& t : transitions_) n += t.size();
  return n;
}

std::optional<std::size_t> Brg::find(LocationId l, const ClockValuation& nu, const ClockRegion& zeta) const {
  auto it = index_.find(Key{l, nu, zeta});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Integer Brg::finiteness_bound(const GameArena& arena) {
  const auto& ctx = arena.context();
  Integer bound = arena.pta().locations().size();
  for (std::size_t i = 0; i < ctx.size(); ++i) bound *= ctx.k() + 1;
  return bound * enumerate_regions(ctx).size();
}

Brg explore_rooted(const GameArena& arena, LocationId l, const ClockValuation& nu, const ClockRegion& zeta,
                   const ExploreOptions& opts) {
  const auto& pta = arena.pta();
  const auto& ctx = pta.context();
  if (l >= pta.locations().size()) throw PreconditionError("unknown location");
  if (!in_closure(nu, zeta))
    throw PreconditionError(nu.to_string(ctx) + " is not in the closure of " + zeta.to_string(ctx));
  if (!satisfies(ctx, zeta, pta.location(l).invariant))
    throw PreconditionError("root region violates the invariant of " + pta.location(l).name);

  Brg g(arena);
  std::deque<std::size_t> frontier;
  auto intern = [&](BrgState s) {
    Brg::Key key{s.location, s.valuation, s.region};
    auto [it, inserted] = g.index_.try_emplace(std::move(key), g.states_.size());
    if (inserted) {
      if (g.states_.size() >= opts.max_states)
        throw ResourceError("boundary region graph exceeds " + std::to_string(opts.max_states) + " states");
      g.states_.push_back(std::move(s));
      g.transitions_.emplace_back();
      frontier.push_back(it->second);
    }
    return it->second;
  };
  intern(BrgState{l, nu, zeta, arena.owner(l), pta.location(l).is_final});

  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop_front();
    const BrgState s = g.states_[i];
    std::vector<BrgTransition> out;
    for (auto& act : boundary_actions(arena, s.location, s.region)) {
      BrgTransition t{act, reward(s, act), {}};
      for (auto& [next, p] : transition_distribution(arena, s, act)) t.successors.emplace_back(intern(next), p);
      out.push_back(std::move(t));
    }
    g.transitions_[i] = std::move(out);
  }
  return g;
}

Brg explore(const GameArena& arena, const ConcreteState& initial, const ExploreOptions& opts) {
  if (!is_valid_state(arena, initial)) throw PreconditionError("initial state violates its location invariant");
  return explore_rooted(arena, initial.location, initial.valuation, region_of(arena.context(), initial.valuation),
                        opts);
}

namespace {

std::string action_label(const Brg& g, const BoundaryAction& a) {
  const auto& ctx = g.context();
  std::string s = g.arena().pta().actions()[a.action] + " (" + std::to_string(a.b) + "," + ctx.name(a.clock) + ") " +
                  std::string(to_string(a.kind));
  if (a.immediate) s += " now";
  return s;
}

}  // namespace

std::string export_dot(const Brg& g) {
  const auto& pta = g.arena().pta();
  const auto& ctx = g.context();
  std::ostringstream os;
  os << "digraph brg {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& s = g.state(i);
    os << "  s" << i << " [label=\"" << pta.location(s.location).name << " " << s.valuation.to_string(ctx) << "\\n"
       << s.region.to_string(ctx) << "\\n" << to_string(s.owner) << (s.is_final ? " final" : "") << "\"";
    if (s.is_final) os << ", peripheries=2";
    if (i == g.initial()) os << ", style=bold";
    os << "];\n";
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& ts = g.transitions(i);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const auto& t = ts[j];
      const std::string hub = "s" + std::to_string(i) + "_" + std::to_string(j);
      os << "  " << hub << " [shape=point];\n";
      os << "  s" << i << " -> " << hub << " [arrowhead=none, label=\"" << action_label(g, t.action) << "\"];\n";
      for (const auto& [k, p] : t.successors)
        os << "  " << hub << " -> s" << k << " [label=\"p=" << to_short_string(p) << ", r=" << to_short_string(t.reward)
           << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string dump_brg(const Brg& g) {
  using nlohmann::json;
  const auto& pta = g.arena().pta();
  const auto& ctx = g.context();
  json doc;
  doc["initial"] = g.initial();
  doc["states"] = json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& s = g.state(i);
    json val = json::object();
    for (ClockId c = 0; c < ctx.size(); ++c) val[ctx.name(c)] = to_short_string(s.valuation[c]);
    json acts = json::array();
    for (const auto& t : g.transitions(i)) {
      json succ = json::array();
      for (const auto& [k, p] : t.successors) succ.push_back({{"state", k}, {"p", to_short_string(p)}});
      acts.push_back({{"action", pta.actions()[t.action.action]},
                      {"b", t.action.b},
                      {"clock", ctx.name(t.action.clock)},
                      {"target", t.action.target.to_string(ctx)},
                      {"kind", std::string(to_string(t.action.kind))},
                      {"immediate", t.action.immediate},
                      {"reward", to_short_string(t.reward)},
                      {"successors", succ}});
    }
    doc["states"].push_back({{"id", i},
                             {"location", pta.location(s.location).name},
                             {"valuation", val},
                             {"region", s.region.to_string(ctx)},
                             {"owner", std::string(to_string(s.owner))},
                             {"final", s.is_final},
                             {"actions", acts}});
  }
  return doc.dump(2);
}

}  // namespace ptg
