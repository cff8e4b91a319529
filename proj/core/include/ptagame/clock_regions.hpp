#pragma once

// Clock valuations, clock constraints and Alur-Dill clock regions over a
// k-bounded clock context. Everything here is exact; no floating point.

#include "ptagame/rational.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ptg {

using ClockId = std::size_t;

/// Small set of clocks, stored as a bitmask over clock indices.
class ClockSet {
 public:
  static constexpr std::size_t kMaxClocks = 64;

  ClockSet() = default;
  static ClockSet of(std::initializer_list<ClockId> ids) {
    ClockSet s;
    for (ClockId id : ids) s.insert(id);
    return s;
  }
  static ClockSet from_bits(std::uint64_t bits) {
    ClockSet s;
    s.bits_ = bits;
    return s;
  }

  void insert(ClockId c) { bits_ |= (std::uint64_t{1} << c); }
  bool contains(ClockId c) const { return (bits_ >> c) & 1U; }
  bool empty() const { return bits_ == 0; }
  std::uint64_t bits() const { return bits_; }

  friend bool operator==(ClockSet, ClockSet) = default;
  friend auto operator<=>(ClockSet, ClockSet) = default;

 private:
  std::uint64_t bits_ = 0;
};

class ClockContext {
 public:
  ClockContext(std::vector<std::string> clocks, int k);

  const std::vector<std::string>& clocks() const { return clocks_; }
  std::size_t size() const { return clocks_.size(); }
  int k() const { return k_; }
  const std::string& name(ClockId c) const { return clocks_.at(c); }

  /// Throws DomainError for unknown names.
  ClockId index_of(std::string_view name) const;
  std::optional<ClockId> find(std::string_view name) const;

  friend bool operator==(const ClockContext&, const ClockContext&) = default;

 private:
  std::vector<std::string> clocks_;
  int k_;
};

/// A k-bounded clock valuation. Coordinates are indexed by ClockId.
class ClockValuation {
 public:
  ClockValuation() = default;
  /// Validates every coordinate lies in [0, k].
  ClockValuation(const ClockContext& ctx, std::vector<Rational> values);
  static ClockValuation zero(const ClockContext& ctx);

  const Rational& operator[](ClockId c) const { return values_.at(c); }
  std::size_t size() const { return values_.size(); }
  const std::vector<Rational>& values() const { return values_; }

  /// nu + t. Throws DomainError if some coordinate would exceed k or t < 0.
  ClockValuation elapse(const ClockContext& ctx, const Rational& t) const;
  /// nu[C := 0].
  ClockValuation reset(ClockSet clocks) const;

  bool is_integral() const;

  std::string to_string(const ClockContext& ctx) const;

  friend bool operator==(const ClockValuation&, const ClockValuation&) = default;
  friend bool operator<(const ClockValuation& a, const ClockValuation& b) {
    return a.values_ < b.values_;
  }

 private:
  std::vector<Rational> values_;
};

enum class Relation { Less, LessEq, Equal, GreaterEq, Greater };

std::string_view to_string(Relation r);

/// Either `clock ~ bound` or `clock - other ~ bound`, bound in [0, k].
struct SimpleConstraint {
  ClockId clock = 0;
  std::optional<ClockId> other;
  Relation rel = Relation::LessEq;
  int bound = 0;

  friend bool operator==(const SimpleConstraint&, const SimpleConstraint&) = default;
};

/// Conjunction of simple constraints; the empty conjunction is `true`.
struct ClockConstraint {
  std::vector<SimpleConstraint> conjuncts;

  bool is_true() const { return conjuncts.empty(); }
  friend bool operator==(const ClockConstraint&, const ClockConstraint&) = default;
};

enum class BoundCheck { Strict, Deferred };

/// Parses `x <= 2 & x - y > 0`, or `true`. Bounds above k are rejected unless
/// the check is deferred to model validation.
ClockConstraint parse_constraint(const ClockContext& ctx, std::string_view text,
                                 BoundCheck check = BoundCheck::Strict);
std::string to_string(const ClockContext& ctx, const SimpleConstraint& sc);
std::string to_string(const ClockContext& ctx, const ClockConstraint& cc);

/// Largest bound appearing in the constraint (0 when empty).
int max_bound(const ClockConstraint& cc);

bool satisfies(const ClockValuation& nu, const SimpleConstraint& sc);
bool satisfies(const ClockValuation& nu, const ClockConstraint& cc);

/// Canonical clock region: integer part per clock plus the ordered partition
/// of clocks by fractional part. blocks[0] is the zero-fraction block and may
/// be empty; every later block is nonempty and has strictly larger fraction.
class ClockRegion {
 public:
  ClockRegion() = default;
  /// Validates and canonicalises (sorts each block).
  ClockRegion(const ClockContext& ctx, std::vector<int> integer_parts,
              std::vector<std::vector<ClockId>> blocks);

  static ClockRegion zero(const ClockContext& ctx);

  const std::vector<int>& integer_parts() const { return int_parts_; }
  int integer_part(ClockId c) const { return int_parts_.at(c); }
  const std::vector<std::vector<ClockId>>& blocks() const { return blocks_; }
  const std::vector<ClockId>& zero_block() const { return blocks_.front(); }
  std::size_t positive_block_count() const { return blocks_.size() - 1; }

  /// Index into blocks() of the block containing c.
  std::size_t block_of(ClockId c) const;
  bool has_zero_fraction(ClockId c) const { return block_of(c) == 0; }

  std::string to_string(const ClockContext& ctx) const;

  friend bool operator==(const ClockRegion&, const ClockRegion&) = default;
  friend auto operator<=>(const ClockRegion&, const ClockRegion&) = default;

 private:
  struct Unchecked {};
  ClockRegion(Unchecked, std::vector<int> integer_parts, std::vector<std::vector<ClockId>> blocks);
  friend ClockRegion reset_region(const ClockRegion& r, ClockSet clocks);

  std::vector<int> int_parts_;
  std::vector<std::vector<ClockId>> blocks_{{}};
};

ClockRegion region_of(const ClockContext& ctx, const ClockValuation& nu);

bool is_thin(const ClockRegion& r);

/// The region entered by letting time elapse. Absent when r is thin with a
/// clock already at k.
std::optional<ClockRegion> time_successor(const ClockContext& ctx, const ClockRegion& r);

ClockRegion reset_region(const ClockRegion& r, ClockSet clocks);

/// Decided from the canonical form; throws DomainError for a bound above k.
bool satisfies(const ClockContext& ctx, const ClockRegion& r, const SimpleConstraint& sc);
bool satisfies(const ClockContext& ctx, const ClockRegion& r, const ClockConstraint& cc);

/// True iff nu lies in the topological closure of r.
bool in_closure(const ClockValuation& nu, const ClockRegion& r);

/// True iff `later` is reachable from `r` by letting time elapse (r ->* later).
bool in_future(const ClockContext& ctx, const ClockRegion& r, const ClockRegion& later);

/// The regions visited by letting time elapse from r, starting with r itself.
std::vector<ClockRegion> future_chain(const ClockContext& ctx, const ClockRegion& r);

/// Integer b and clock c with r ->_{b,c} thin.
struct BoundaryPoint {
  int b = 0;
  ClockId clock = 0;
  friend bool operator==(const BoundaryPoint&, const BoundaryPoint&) = default;
  friend auto operator<=>(const BoundaryPoint&, const BoundaryPoint&) = default;
};

/// Present iff `thin` is in the future of r. The clock is the first clock, in
/// context order, of thin's zero-fraction block; b is its integer part there.
/// Throws DomainError if `thin` is not thin.
std::optional<BoundaryPoint> boundary_coordinates(const ClockContext& ctx, const ClockRegion& r,
                                                  const ClockRegion& thin);

/// Witness t of nu <| nu2 (diagonal order), if any.
std::optional<Rational> diag_leq(const ClockValuation& nu, const ClockValuation& nu2);

/// An interval of delays. Closed ends are flagged.
struct DelayInterval {
  Rational lo;
  Rational hi;
  bool lo_closed = true;
  bool hi_closed = true;

  bool is_point() const { return lo_closed && hi_closed && lo == hi; }
  bool contains(const Rational& t) const {
    return (lo_closed ? t >= lo : t > lo) && (hi_closed ? t <= hi : t < hi);
  }
};

/// {t >= 0 | nu + t in r}, or absent when that set is empty.
std::optional<DelayInterval> delays_into(const ClockContext& ctx, const ClockValuation& nu,
                                         const ClockRegion& r);

/// A valuation inside r whose fractional parts are i/(m+1) for the i-th
/// positive block, m being the number of positive blocks.
ClockValuation representative(const ClockContext& ctx, const ClockRegion& r);

/// Every canonical region of the context.
std::vector<ClockRegion> enumerate_regions(const ClockContext& ctx);

}  // namespace ptg
