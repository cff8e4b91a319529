#pragma once

// Monte Carlo plays of the concrete game under strategies read off solved
// boundary region graphs.

#include "ptagame/game_solver.hpp"
#include "ptagame/random.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace ptg {

/// Positional choices for states of the form ((l, nu), (l, [nu])). States of
/// the seeding graph use its strategies; any other concrete state is solved
/// exactly from its own root on first use and remembered.
class StrategyTable {
 public:
  StrategyTable(const GameArena& arena, SolveConfig cfg = {});
  StrategyTable(const Brg& brg, const PositionalStrategy& min, const PositionalStrategy& max, SolveConfig cfg = {});

  const GameArena& arena() const { return arena_; }

  /// The boundary action for the owner of s, absent at final states.
  std::optional<BoundaryAction> choose(const ConcreteState& s) const;

  std::size_t solved_roots() const;

 private:
  using Key = std::pair<LocationId, ClockValuation>;
  void absorb(const Brg& g, const PositionalStrategy& min, const PositionalStrategy& max) const;

  GameArena arena_;
  SolveConfig cfg_;
  mutable std::mutex mu_;
  mutable std::map<Key, std::optional<BoundaryAction>> table_;
  mutable std::size_t roots_ = 0;
};

struct ConcretizedStrategy {
  std::shared_ptr<const StrategyTable> table;
  Player player = Player::Min;
  /// Inward nudge for open targets.
  Rational epsilon{1, 1000};
  /// Use epsilon / 2^(n+1) at step n instead of a fixed epsilon.
  bool decaying = false;
};

/// Delay and action realising the strategy's boundary action at s. Thin
/// targets are hit exactly; thick targets are entered eps' inside their
/// infimum or supremum, eps' = min(eps, half the delay interval width).
/// Throws PreconditionError if s is not owned by the strategy's player or
/// the table has no action for s.
TimedAction concretize_action(const ConcretizedStrategy& strategy, const ConcreteState& s, std::size_t step = 0);

struct TraceStep {
  ConcreteState state;
  TimedAction action;
  /// Index of the sampled branch in the aggregated successor distribution.
  std::size_t branch = 0;
};

struct RunRecord {
  bool reached_target = false;
  Rational total_time{0};
  std::size_t steps = 0;
  std::optional<std::vector<TraceStep>> trace;
};

/// Picks a successor by drawing an integer below the common denominator of
/// the probabilities and walking the cumulative numerators.
std::size_t sample_branch(const StateDistribution& dist, std::mt19937_64& rng);

RunRecord simulate_run(const GameArena& arena, const ConcretizedStrategy& min, const ConcretizedStrategy& max,
                       const ConcreteState& s0, std::mt19937_64& rng, std::size_t step_cap = 10'000,
                       bool record_trace = false);
RunRecord simulate_run(const GameArena& arena, const ConcretizedStrategy& min, const ConcretizedStrategy& max,
                       const ConcreteState& s0, std::uint64_t seed, std::size_t step_cap = 10'000,
                       bool record_trace = false);

struct Estimate {
  double mean = 0;
  double half_width = 0;
  /// Mean over reached runs in exact arithmetic.
  Rational exact_mean{0};
  std::size_t runs = 0;
  std::size_t reached = 0;
  double unreached_fraction = 0;
};

struct EstimateOptions {
  std::size_t step_cap = 10'000;
  unsigned threads = 1;
};

/// Run i uses stream_for(seed, i), so the result does not depend on the
/// number of threads. Throws DomainError when n_runs < 2.
Estimate estimate_value(const GameArena& arena, const ConcretizedStrategy& min, const ConcretizedStrategy& max,
                        const ConcreteState& s0, std::size_t n_runs, std::uint64_t seed,
                        const EstimateOptions& opts = {});

std::string format_trace(const GameArena& arena, const std::vector<TraceStep>& trace);

}  // namespace ptg
