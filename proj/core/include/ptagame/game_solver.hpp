#pragma once

// Solving the optimality equations on an explored boundary region graph.

#include "ptagame/brg.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ptg {

/// Almost-sure reachability of the target fails; carries the offending states.
class AssumptionError : public std::runtime_error {
 public:
  AssumptionError(const std::string& what, std::vector<std::size_t> witness)
      : std::runtime_error(what), witness_(std::move(witness)) {}
  const std::vector<std::size_t>& witness() const { return witness_; }

 private:
  std::vector<std::size_t> witness_;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

enum class SweepOrder {
  MinFirst,  // Min improves in the outer loop against Max best responses
  MaxFirst,
};

enum class DiscountMode {
  StopAtTarget,     // final states are worth 0
  InfiniteHorizon,  // final states keep playing
};

struct SolveConfig {
  Rational tolerance{1, 1'000'000'000};
  std::size_t max_iterations = 1'000'000;
  Rational lambda{0};
  Rational epsilon{1, 1'000'000'000};
  SweepOrder sweep = SweepOrder::MinFirst;
  /// Seed strategy improvement from value iteration; otherwise start from
  /// each state's first action.
  bool warm_start = true;
  DiscountMode discount_mode = DiscountMode::StopAtTarget;
};

using ApproxValues = std::vector<double>;
using ExactValues = std::vector<ExtendedRational>;

/// Index into brg.transitions(s) per state; absent where the player does not choose.
struct PositionalStrategy {
  Player player = Player::Min;
  std::vector<std::optional<std::size_t>> choice;

  const BoundaryAction* action(const Brg& brg, std::size_t s) const;
};

struct ReachCheck {
  bool ok = true;
  /// States of an end component avoiding the target, or non-final deadlocks.
  std::vector<std::size_t> witness;
  std::string reason;
};

ReachCheck check_assumption_reach(const Brg& brg);

/// One application of the improvement operator. Throws ModelError at a
/// non-final state without actions.
ApproxValues improve_step(const Brg& brg, const ApproxValues& f);

struct ViResult {
  ApproxValues values;
  std::size_t iterations = 0;
  double residual = 0;
  std::vector<double> residuals;
};

/// Jacobi iteration from 0. Stops once both the residual r and the geometric
/// tail estimate r*q/(1-q) (q the last residual ratio) are within tolerance.
ViResult value_iterate(const Brg& brg, const SolveConfig& cfg = {});

/// Argmin for Min, argmax for Max; near-ties go to the earlier action.
std::pair<PositionalStrategy, PositionalStrategy> extract_strategies(const Brg& brg, const ApproxValues& f);

/// Exact expected time to the target under a fixed pair; infinity where the
/// target is not reached almost surely.
ExactValues evaluate_pair_exact(const Brg& brg, const PositionalStrategy& min, const PositionalStrategy& max);

struct CertViolation {
  std::size_t state = 0;
  std::optional<std::size_t> best_action;
  /// |v(s) - optimum|; infinite when exactly one side is.
  ExtendedRational amount;
};

struct Certificate {
  bool ok = true;
  std::vector<CertViolation> violations;
};

Certificate certify(const Brg& brg, const ExactValues& v);

struct SolveResult {
  ExactValues values;
  PositionalStrategy min;
  PositionalStrategy max;
  Certificate certificate;
  ApproxValues approx;
  std::size_t vi_iterations = 0;
  double vi_residual = 0;
  std::size_t improvement_rounds = 0;
};

/// Value iteration, extraction, exact evaluation and strategy improvement,
/// ending in a certificate. Throws AssumptionError when the target is not
/// reached almost surely under some pair.
SolveResult solve_exact(const Brg& brg, const SolveConfig& cfg = {});

/// Expected discounted time: D(s) = opt lambda * (reward + sum p * D(s')).
/// Throws DomainError unless 0 <= lambda < 1.
SolveResult solve_discounted(const Brg& brg, const SolveConfig& cfg);

/// Exact lambda-weighted evaluation of a fixed pair.
ExactValues evaluate_pair_discounted(const Brg& brg, const PositionalStrategy& min, const PositionalStrategy& max,
                                     const Rational& lambda, DiscountMode mode = DiscountMode::StopAtTarget);
Certificate certify_discounted(const Brg& brg, const ExactValues& v, const Rational& lambda,
                               DiscountMode mode = DiscountMode::StopAtTarget);

/// e, or e - nu(c), or infinity.
struct SimpleForm {
  enum class Kind { Infinity, Constant, Slope };
  Kind kind = Kind::Infinity;
  Integer e = 0;
  ClockId clock = 0;

  static SimpleForm infinity() { return {}; }
  static SimpleForm constant(Integer e) { return {Kind::Constant, std::move(e), 0}; }
  static SimpleForm slope(Integer e, ClockId c) { return {Kind::Slope, std::move(e), c}; }

  ExtendedRational at(const ClockValuation& nu) const;
  std::string to_string(const ClockContext& ctx) const;

  friend bool operator==(const SimpleForm&, const SimpleForm&) = default;
};

using RegionKey = std::pair<LocationId, ClockRegion>;

struct TaSolution {
  std::map<RegionKey, SimpleForm> forms;
  std::size_t iterations = 0;

  /// Form of (l, zeta) evaluated at nu.
  ExtendedRational value(LocationId l, const ClockRegion& zeta, const ClockValuation& nu) const;
};

/// Region-level iteration from 0 on final regions and infinity elsewhere
/// until the forms stop changing. Throws PreconditionError on a
/// probabilistic arena.
TaSolution solve_ta_simple(const GameArena& arena, std::size_t max_iterations = 100'000);

/// JSON document: values (fraction and decimal), strategies, certificate, iteration counts.
std::string dump_solution(const Brg& brg, const SolveResult& r);

}  // namespace ptg
