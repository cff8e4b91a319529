#pragma once

// Pointwise game values via rooted boundary region graphs, and sampled checks
// of the regional structure of those values.

#include "ptagame/game_solver.hpp"
#include "ptagame/random.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

namespace ptg {

/// Memoised exact value of ((l, nu), (l, zeta)), obtained by solving the
/// graph rooted there. Safe to share between threads.
class ValueOracle {
 public:
  explicit ValueOracle(const GameArena& arena, SolveConfig cfg = {}, ExploreOptions explore = {});

  const GameArena& arena() const { return *arena_; }

  /// Value at the concrete state s, i.e. rooted at (l, [nu]).
  Rational at(const ConcreteState& s) const;
  /// Value at a point of the closure of zeta. Throws AssumptionError when the
  /// target is not reached almost surely from the root.
  Rational at(LocationId l, const ClockValuation& nu, const ClockRegion& zeta) const;

  std::size_t cache_size() const;

 private:
  using Key = std::tuple<LocationId, ClockValuation, ClockRegion>;
  const GameArena* arena_;
  SolveConfig cfg_;
  ExploreOptions explore_;
  mutable std::mutex mu_;
  mutable std::map<Key, Rational> cache_;
};

/// One-shot form of ValueOracle::at.
Rational value_at(const GameArena& arena, const ConcreteState& s, const SolveConfig& cfg = {});

/// F(l, nu, zeta) with nu in the closure of zeta.
using Evaluator = std::function<Rational(LocationId, const ClockValuation&, const ClockRegion&)>;

Evaluator as_evaluator(const ValueOracle& oracle);

/// Regions (l, zeta) occurring in the graph.
std::set<RegionKey> reachable_regions(const Brg& brg);

/// Valuation with all fractional parts over one denominator d <= 64.
/// Interior points lie in zeta; closure points may sit on its faces.
ClockValuation sample_interior(const ClockContext& ctx, const ClockRegion& zeta, std::mt19937_64& rng);
ClockValuation sample_closure(const ClockContext& ctx, const ClockRegion& zeta, std::mt19937_64& rng);

/// Fits the values at sample_count interior samples (and the region
/// representative) with e or e - nu(c). The clock reported is the first of its
/// fractional block, matching solve_ta_simple.
std::optional<SimpleForm> fit_simple(const ValueOracle& oracle, LocationId l, const ClockRegion& zeta,
                                     std::size_t sample_count = 16, std::uint64_t seed = 1);

struct SamplePair {
  ClockValuation nu;
  ClockValuation nu2;
  /// Set for pairs built as nu <| nu2 with nu2 - nu = shift.
  std::optional<Rational> shift;
};

/// pair_count unconstrained pairs and pair_count diagonal pairs in the
/// closure of zeta. Thin point regions admit no diagonal pairs.
std::vector<SamplePair> sample_pairs(const ClockContext& ctx, const ClockRegion& zeta, std::size_t pair_count,
                                     std::uint64_t seed);

struct PairWitness {
  ClockValuation nu;
  ClockValuation nu2;
  Rational f_nu;
  Rational f_nu2;
};

struct PropertyReport {
  Rational lipschitz_estimate{0};
  std::vector<PairWitness> lipschitz_violations;
  std::vector<PairWitness> monotonicity_violations;
  std::vector<PairWitness> nonexpansive_violations;
  std::size_t samples_checked = 0;

  bool passed() const {
    return lipschitz_violations.empty() && monotonicity_violations.empty() && nonexpansive_violations.empty();
  }
};

/// |F(nu)-F(nu2)| <= K |nu-nu2|_inf on every pair, and F(nu) >= F(nu2),
/// F(nu)-F(nu2) <= t on every pair with nu <| nu2 by t.
PropertyReport check_pairs(const Evaluator& f, LocationId l, const ClockRegion& zeta,
                           const std::vector<SamplePair>& pairs, const Rational& k_bound, unsigned threads = 1);

struct QuasiSimpleOptions {
  std::size_t pair_count = 200;
  /// Defaults to 1 + |C| when absent.
  std::optional<Rational> k_bound;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

PropertyReport check_quasi_simple(const Evaluator& f, const ClockContext& ctx, LocationId l, const ClockRegion& zeta,
                                  const QuasiSimpleOptions& opts = {});
PropertyReport check_quasi_simple(const ValueOracle& oracle, LocationId l, const ClockRegion& zeta,
                                  const QuasiSimpleOptions& opts = {});

/// Deliberately broken evaluators for exercising the checks.
Evaluator plus_square(Evaluator f, ClockId c);       // F + nu(c)^2
Evaluator minus_twice(Evaluator f, ClockId c);       // F - 2 nu(c)
Evaluator pointwise_min(Evaluator f, Evaluator g);
Evaluator pointwise_max(Evaluator f, Evaluator g);

/// nu -> reward + sum p * F(successor) for one fixed boundary action of (l, zeta).
Evaluator one_step(const GameArena& arena, Evaluator f, const BoundaryAction& act);

struct TimeMonotoneReport {
  bool nondecreasing = true;
  /// (t, F+(t)) in increasing t.
  std::vector<std::pair<Rational, Rational>> samples;
  /// Indices i with F+(t_i) > F+(t_{i+1}).
  std::vector<std::size_t> violations;
};

/// F+(t) = t + sum p * value(successor of (t, a)) over grid_count points of
/// {t | nu + t in target}. Throws DomainError if that set is empty and
/// PreconditionError if a is not enabled in target.
TimeMonotoneReport check_time_monotone(const ValueOracle& oracle, const ConcreteState& s, ActionId a,
                                       const ClockRegion& target, std::size_t grid_count);

struct GridOptimum {
  Rational value;
  Rational delay;
  ActionId action = 0;
  std::size_t candidates = 0;
};

/// Best one-step value over delays j*h and the delays at which some clock
/// becomes integral, for every action allowed at s. Min states minimise, Max
/// states maximise. Throws PreconditionError at final states or when no timed
/// action is allowed.
GridOptimum grid_one_step(const ValueOracle& oracle, const ConcreteState& s, const Rational& h);

}  // namespace ptg
