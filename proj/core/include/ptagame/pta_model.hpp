#pragma once

// Probabilistic timed automata, game arenas and their dense-time semantics.

#include "ptagame/clock_regions.hpp"
#include "ptagame/rational.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ptg {

using LocationId = std::size_t;
using ActionId = std::size_t;

enum class Player { Min, Max };

std::string_view to_string(Player p);

/// Violated precondition of an operation (e.g. stepping with a disallowed action).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The model is structurally unusable for the requested operation.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Location {
  std::string name;
  bool is_final = false;
  ClockConstraint invariant;
};

struct Branch {
  Rational probability;
  ClockSet resets;
  LocationId target = 0;
};

/// E(l, a) together with delta(l, a).
struct Edge {
  LocationId source = 0;
  ActionId action = 0;
  ClockConstraint guard;
  std::vector<Branch> branches;
};

class Pta {
 public:
  Pta(ClockContext ctx, std::vector<Location> locations, std::vector<std::string> actions,
      std::vector<Edge> edges);

  const ClockContext& context() const { return ctx_; }
  const std::vector<Location>& locations() const { return locations_; }
  const Location& location(LocationId l) const { return locations_.at(l); }
  const std::vector<std::string>& actions() const { return actions_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// The edge for (l, a), or nullptr when a is not available in l.
  const Edge* edge(LocationId l, ActionId a) const;
  /// Edges leaving l, ordered by action id.
  std::vector<const Edge*> edges_from(LocationId l) const;

  std::optional<LocationId> find_location(std::string_view name) const;
  std::optional<ActionId> find_action(std::string_view name) const;

  /// Every delta(l, a) is a point distribution.
  bool is_timed_automaton() const;

 private:
  ClockContext ctx_;
  std::vector<Location> locations_;
  std::vector<std::string> actions_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> by_location_;  // edge indices per source
};

class GameArena {
 public:
  GameArena(Pta pta, std::vector<Player> owners);

  const Pta& pta() const { return pta_; }
  const ClockContext& context() const { return pta_.context(); }
  Player owner(LocationId l) const { return owners_.at(l); }
  std::vector<LocationId> min_locations() const;
  std::vector<LocationId> max_locations() const;

 private:
  Pta pta_;
  std::vector<Player> owners_;
};

struct ConcreteState {
  LocationId location = 0;
  ClockValuation valuation;

  friend bool operator==(const ConcreteState&, const ConcreteState&) = default;
  friend bool operator<(const ConcreteState& a, const ConcreteState& b) {
    if (a.location != b.location) return a.location < b.location;
    return a.valuation < b.valuation;
  }
};

struct TimedAction {
  Rational delay;
  ActionId action = 0;
};

using StateDistribution = std::vector<std::pair<ConcreteState, Rational>>;

struct Violation {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks probability sums, constraint bounds, per-region availability of
/// some action, invariant-respecting branch targets, and structural
/// non-Zenoness. Never throws for model defects; they are reported.
ValidationReport validate(const GameArena& arena);

struct NonZenoResult {
  bool ok = true;
  /// Locations along an offending cycle (first location repeated at the end).
  std::vector<LocationId> cycle;
};

/// Every cycle of the location graph must reset some clock c on one edge and
/// require c >= 1 on some edge.
NonZenoResult check_structural_nonzeno(const Pta& pta);

/// True iff every valuation in [0,k] satisfying `guard` has clock c >= 1.
bool entails_at_least_one(const ClockContext& ctx, const ClockConstraint& guard, ClockId c);

bool is_valid_state(const GameArena& arena, const ConcreteState& s);

/// (t, a) is available at s: the invariant holds along [0, t], the guard holds
/// at nu + t, and nu + t stays within k. Throws DomainError for an unknown action.
bool timed_action_allowed(const GameArena& arena, const ConcreteState& s, const TimedAction& ta);

/// Distribution over successor states, aggregated and sorted by state.
/// Throws PreconditionError if the action is not allowed.
StateDistribution concrete_step(const GameArena& arena, const ConcreteState& s, const TimedAction& ta);

}  // namespace ptg
