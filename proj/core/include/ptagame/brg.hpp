#pragma once

// Boundary region graph: states pair a concrete valuation with a region whose
// closure contains it; actions fire at region boundaries.

#include "ptagame/pta_model.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace ptg {

/// Exploration exceeded its state budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BrgState {
  LocationId location = 0;
  ClockValuation valuation;
  ClockRegion region;
  Player owner = Player::Min;
  bool is_final = false;

  friend bool operator==(const BrgState&, const BrgState&) = default;
};

enum class BoundaryKind {
  Thin,      // target region is thin; a single firing time
  Infimum,   // lower boundary of a thick target
  Supremum,  // upper boundary of a thick target
};

std::string_view to_string(BoundaryKind k);

struct BoundaryAction {
  int b = 0;
  ClockId clock = 0;
  ActionId action = 0;
  ClockRegion target;
  BoundaryKind kind = BoundaryKind::Thin;
  /// Infimum action of a thick target equal to the source region: fires with
  /// no delay, so the valuation is kept and the reward is 0.
  bool immediate = false;

  auto key() const { return std::tie(action, b, clock, target); }
  friend bool operator==(const BoundaryAction& x, const BoundaryAction& y) {
    return x.key() == y.key() && x.kind == y.kind && x.immediate == y.immediate;
  }
};

/// Actions available from (l, zeta), sorted by action, b, clock, then the
/// position of the target along the time-successor chain of zeta. Throws
/// PreconditionError if zeta violates inv(l).
std::vector<BoundaryAction> boundary_actions(const GameArena& arena, LocationId l, const ClockRegion& zeta);

/// b - nu(c), or 0 for an immediate action. Throws std::logic_error if negative.
Rational reward(const BrgState& s, const BoundaryAction& act);

/// nu + time(nu, (b, c)); nu itself for an immediate action.
ClockValuation firing_valuation(const ClockContext& ctx, const BrgState& s, const BoundaryAction& act);

/// Successor distribution, aggregated over equal targets, in branch order of first appearance.
std::vector<std::pair<BrgState, Rational>> transition_distribution(const GameArena& arena, const BrgState& s,
                                                                   const BoundaryAction& act);

struct BrgTransition {
  BoundaryAction action;
  Rational reward;
  std::vector<std::pair<std::size_t, Rational>> successors;  // (state index, probability)
};

struct ExploreOptions {
  std::size_t max_states = 2'000'000;
};

class Brg {
 public:
  const GameArena& arena() const { return arena_; }
  const ClockContext& context() const { return arena_.context(); }

  std::size_t size() const { return states_.size(); }
  const std::vector<BrgState>& states() const { return states_; }
  const BrgState& state(std::size_t i) const { return states_.at(i); }
  const std::vector<BrgTransition>& transitions(std::size_t i) const { return transitions_.at(i); }
  std::size_t initial() const { return 0; }
  std::size_t transition_count() const;

  std::optional<std::size_t> find(LocationId l, const ClockValuation& nu, const ClockRegion& zeta) const;

  /// |L| * (k+1)^|C| * #regions.
  static Integer finiteness_bound(const GameArena& arena);

 private:
  friend Brg explore_rooted(const GameArena&, LocationId, const ClockValuation&, const ClockRegion&,
                            const ExploreOptions&);
  explicit Brg(GameArena arena) : arena_(std::move(arena)) {}

  using Key = std::tuple<LocationId, ClockValuation, ClockRegion>;

  GameArena arena_;
  std::vector<BrgState> states_;
  std::vector<std::vector<BrgTransition>> transitions_;
  std::map<Key, std::size_t> index_;
};

/// BFS from ((l0, nu0), (l0, [nu0])). Throws PreconditionError if nu0 violates
/// inv(l0) and ResourceError past the state cap.
Brg explore(const GameArena& arena, const ConcreteState& initial, const ExploreOptions& opts = {});

/// BFS from ((l, nu), (l, zeta)); nu must lie in the closure of zeta.
Brg explore_rooted(const GameArena& arena, LocationId l, const ClockValuation& nu, const ClockRegion& zeta,
                   const ExploreOptions& opts = {});

/// Graphviz text. Byte-identical for equal graphs.
std::string export_dot(const Brg& brg);

/// JSON document listing states, actions, rewards and distributions as exact fractions.
std::string dump_brg(const Brg& brg);

}  // namespace ptg
