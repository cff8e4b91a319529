#include "doctest.h"
#include "oracles.hpp"

#include "ptagame/clock_regions.hpp"

#include <map>

using namespace ptg;

namespace {

ClockContext xy2() { return ClockContext({"x", "y"}, 2); }

ClockValuation val(const ClockContext& ctx, std::vector<Rational> v) {
  return ClockValuation(ctx, std::move(v));
}

Rational q(long n, long d = 1) { return Rational(n, d); }

}  // namespace

TEST_CASE("region_of canonical forms") {
  const auto ctx = xy2();

  SUBCASE("all-integer valuation") {
    auto r = region_of(ctx, val(ctx, {0, 0}));
    CHECK(r.integer_parts() == std::vector<int>{0, 0});
    CHECK(r.zero_block() == std::vector<ClockId>{0, 1});
    CHECK(r.positive_block_count() == 0);
  }
  SUBCASE("fractions ordered y before x") {
    auto nu = val(ctx, {q(1, 2), q(6, 5)});
    auto r = region_of(ctx, nu);
    CHECK(r.integer_parts() == std::vector<int>{0, 1});
    CHECK(r.zero_block().empty());
    REQUIRE(r.blocks().size() == 3);
    CHECK(r.blocks()[1] == std::vector<ClockId>{1});
    CHECK(r.blocks()[2] == std::vector<ClockId>{0});
    // maximality: the representative satisfies exactly the same constraints
    CHECK(oracle::signature(ctx, representative(ctx, r)) == oracle::signature(ctx, nu));
  }
  SUBCASE("x integral, y fractional") {
    auto nu = val(ctx, {1, q(3, 10)});
    auto r = region_of(ctx, nu);
    CHECK(r.integer_parts() == std::vector<int>{1, 0});
    CHECK(r.zero_block() == std::vector<ClockId>{0});
    REQUIRE(r.blocks().size() == 2);
    CHECK(r.blocks()[1] == std::vector<ClockId>{1});
    CHECK(oracle::signature(ctx, representative(ctx, r)) == oracle::signature(ctx, nu));
  }
  SUBCASE("coordinate outside [0,k]") {
    CHECK_THROWS_AS(ClockValuation(ctx, {q(5, 2), 0}), DomainError);
    CHECK_THROWS_AS(ClockValuation(ctx, {q(-1, 2), 0}), DomainError);
  }
}

TEST_CASE("is_thin") {
  const auto ctx = xy2();
  CHECK(is_thin(region_of(ctx, val(ctx, {0, 0}))));
  CHECK_FALSE(is_thin(region_of(ctx, val(ctx, {q(1, 2), q(6, 5)}))));
  CHECK(is_thin(region_of(ctx, val(ctx, {1, q(3, 10)}))));

  // oracle: thin iff every small elapse changes the constraint signature
  oracle::RandomValuations gen(11);
  for (int i = 0; i < 300; ++i) {
    auto nu = gen.valuation(ctx, 6);
    bool at_k = false;
    for (const auto& v : nu.values()) at_k = at_k || v == ctx.k();
    if (at_k) continue;
    Rational eps = oracle::next_integer_event(nu) / 2;
    bool changes = oracle::signature(ctx, nu) != oracle::signature(ctx, oracle::shifted(ctx, nu, eps));
    CHECK(is_thin(region_of(ctx, nu)) == changes);
  }
}

TEST_CASE("time_successor") {
  const auto ctx = xy2();
  SUBCASE("zero region to 0<x=y<1") {
    auto s = time_successor(ctx, ClockRegion::zero(ctx));
    REQUIRE(s);
    CHECK(s->zero_block().empty());
    REQUIRE(s->blocks().size() == 2);
    CHECK(s->blocks()[1] == std::vector<ClockId>{0, 1});
    CHECK(*s == region_of(ctx, val(ctx, {q(1, 3), q(1, 3)})));
  }
  SUBCASE("x=1, 0<y<1 moves x into the smallest fraction block") {
    auto s = time_successor(ctx, region_of(ctx, val(ctx, {1, q(3, 10)})));
    REQUIRE(s);
    CHECK(s->integer_parts() == std::vector<int>{1, 0});
    REQUIRE(s->blocks().size() == 3);
    CHECK(s->blocks()[1] == std::vector<ClockId>{0});
    CHECK(s->blocks()[2] == std::vector<ClockId>{1});
  }
  SUBCASE("clocks at k have no successor") {
    CHECK_FALSE(time_successor(ctx, region_of(ctx, val(ctx, {2, 2}))));
    CHECK_FALSE(time_successor(ctx, region_of(ctx, val(ctx, {2, q(1, 2)}))));
  }
}

TEST_CASE("time_successor agrees with epsilon-elapse recomputation") {
  for (int n = 1; n <= 3; ++n) {
    for (int k = 1; k <= 2; ++k) {
      std::vector<std::string> names;
      for (int c = 0; c < n; ++c) names.push_back("c" + std::to_string(c));
      ClockContext ctx(names, k);
      oracle::RandomValuations gen(100 + n * 10 + k);
      for (int i = 0; i < 150; ++i) {
        auto nu = gen.valuation(ctx, 5);
        auto r = region_of(ctx, nu);
        auto succ = time_successor(ctx, r);
        bool at_k = false;
        for (const auto& v : nu.values()) at_k = at_k || v == k;
        if (at_k) {
          CHECK_FALSE(succ);
          continue;
        }
        REQUIRE(succ);
        Rational event = oracle::next_integer_event(nu);
        Rational t = is_thin(r) ? event / 2 : event;
        auto moved = oracle::shifted(ctx, nu, t);
        CHECK(oracle::signature(ctx, moved) == oracle::signature(ctx, representative(ctx, *succ)));
        CHECK(is_thin(*succ) != is_thin(r));
      }
    }
  }
}

TEST_CASE("successor chains terminate within 2|C|(k+1) steps and alternate") {
  for (int n = 1; n <= 3; ++n) {
    for (int k = 1; k <= 2; ++k) {
      std::vector<std::string> names;
      for (int c = 0; c < n; ++c) names.push_back("c" + std::to_string(c));
      ClockContext ctx(names, k);
      for (const auto& r : enumerate_regions(ctx)) {
        auto chain = future_chain(ctx, r);
        CHECK(chain.size() - 1 <= static_cast<std::size_t>(2 * n * (k + 1)));
        for (std::size_t i = 1; i < chain.size(); ++i) CHECK(is_thin(chain[i]) != is_thin(chain[i - 1]));
      }
    }
  }
}

TEST_CASE("region enumeration matches a dense-grid signature partition") {
  for (int n = 1; n <= 3; ++n) {
    for (int k = 1; k <= 2; ++k) {
      std::vector<std::string> names;
      for (int c = 0; c < n; ++c) names.push_back("c" + std::to_string(c));
      ClockContext ctx(names, k);
      const int den = n + 1;  // enough distinct fractions to separate n clocks
      const int steps = k * den + 1;
      std::set<oracle::Signature> classes;
      std::vector<int> idx(n, 0);
      while (true) {
        std::vector<Rational> v(n);
        for (int c = 0; c < n; ++c) v[c] = Rational(idx[c], den);
        classes.insert(oracle::signature(ctx, ClockValuation(ctx, v)));
        int c = 0;
        while (c < n && ++idx[c] == steps) idx[c++] = 0;
        if (c == n) break;
      }
      const auto regions = enumerate_regions(ctx);
      CHECK(regions.size() == classes.size());
      std::set<oracle::Signature> from_regions;
      for (const auto& r : regions) from_regions.insert(oracle::signature(ctx, representative(ctx, r)));
      CHECK(from_regions == classes);
    }
  }
  CHECK(enumerate_regions(ClockContext({"c"}, 2)).size() == 5);
}

TEST_CASE("canonical-form soundness on random pairs") {
  oracle::RandomValuations gen(2024);
  int equal_pairs = 0;
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + i % 3;
    const int k = 1 + (i / 3) % 2;
    std::vector<std::string> names;
    for (int c = 0; c < n; ++c) names.push_back("c" + std::to_string(c));
    ClockContext ctx(names, k);
    auto a = gen.valuation(ctx, 4);
    auto b = gen.valuation(ctx, 4);
    bool same_region = region_of(ctx, a) == region_of(ctx, b);
    bool same_sig = oracle::signature(ctx, a) == oracle::signature(ctx, b);
    CHECK(same_region == same_sig);
    equal_pairs += same_sig;
  }
  CHECK(equal_pairs > 20);  // the sample exercises both directions
}

TEST_CASE("reset_region") {
  const auto ctx = xy2();
  auto r = region_of(ctx, val(ctx, {q(1, 2), q(6, 5)}));
  CHECK(reset_region(r, ClockSet::of({0, 1})) == ClockRegion::zero(ctx));
  CHECK(reset_region(r, ClockSet::of({0})) == region_of(ctx, val(ctx, {0, q(6, 5)})));
  CHECK(reset_region(r, ClockSet{}) == r);

  oracle::RandomValuations gen(5);
  for (int i = 0; i < 300; ++i) {
    auto nu = gen.valuation(ctx, 7);
    ClockSet cs = ClockSet::from_bits(static_cast<std::uint64_t>(i % 4));
    CHECK(reset_region(region_of(ctx, nu), cs) == region_of(ctx, nu.reset(cs)));
  }
}

TEST_CASE("satisfies on regions") {
  const auto ctx = xy2();
  CHECK(satisfies(ctx, ClockRegion::zero(ctx), parse_constraint(ctx, "x <= 0 & y >= 0")));
  CHECK(satisfies(ctx, region_of(ctx, val(ctx, {q(1, 2), q(6, 5)})), parse_constraint(ctx, "x - y < 0")));
  CHECK_FALSE(satisfies(ctx, region_of(ctx, val(ctx, {1, q(3, 10)})), parse_constraint(ctx, "x >= 2")));

  SimpleConstraint too_big{0, std::nullopt, Relation::Less, 3};
  CHECK_THROWS_AS(satisfies(ctx, ClockRegion::zero(ctx), too_big), DomainError);

  // region-constancy: agrees with direct evaluation on every simple constraint
  oracle::RandomValuations gen(77);
  static constexpr Relation kRels[] = {Relation::Less, Relation::LessEq, Relation::Equal,
                                       Relation::GreaterEq, Relation::Greater};
  for (int i = 0; i < 200; ++i) {
    auto nu = gen.valuation(ctx, 6);
    auto r = region_of(ctx, nu);
    for (ClockId c = 0; c < 2; ++c)
      for (int o = -1; o < 2; ++o) {
        if (o == static_cast<int>(c)) continue;
        for (Relation rel : kRels)
          for (int b = 0; b <= 2; ++b) {
            SimpleConstraint sc{c, o < 0 ? std::nullopt : std::optional<ClockId>(o), rel, b};
            CHECK(satisfies(ctx, r, sc) == satisfies(nu, sc));
          }
      }
  }
}

TEST_CASE("constraint syntax") {
  const auto ctx = xy2();
  auto cc = parse_constraint(ctx, " x>=1 & x<=2 ");
  CHECK(cc.conjuncts.size() == 2);
  CHECK_THROWS_AS(parse_constraint(ctx, "1 <= x"), DomainError);  // atoms are clock-first
  cc = parse_constraint(ctx, "x >= 1 & x <= 2 & x - y = 0");
  REQUIRE(cc.conjuncts.size() == 3);
  CHECK(cc.conjuncts[2].other == std::optional<ClockId>(1));
  CHECK(to_string(ctx, cc) == "x >= 1 & x <= 2 & x - y = 0");
  CHECK(parse_constraint(ctx, "true").is_true());
  CHECK_THROWS_AS(parse_constraint(ctx, "x <= 5"), DomainError);
  CHECK_THROWS_AS(parse_constraint(ctx, "z <= 1"), DomainError);
  CHECK_THROWS_AS(parse_constraint(ctx, "x - x <= 1"), DomainError);
  CHECK_THROWS_AS(parse_constraint(ctx, "x <= 0.5"), DomainError);
  CHECK_THROWS_AS(parse_constraint(ctx, ""), DomainError);
}

TEST_CASE("boundary_coordinates") {
  const ClockContext ctx({"x", "y"}, 2);
  const auto zero = ClockRegion::zero(ctx);

  SUBCASE("zero region to x=y=1") {
    auto target = region_of(ctx, val(ctx, {1, 1}));
    auto bc = boundary_coordinates(ctx, zero, target);
    REQUIRE(bc);
    CHECK(*bc == BoundaryPoint{1, 0});
  }
  SUBCASE("thin region to itself is a zero-time boundary") {
    auto r = region_of(ctx, val(ctx, {1, q(3, 10)}));
    auto bc = boundary_coordinates(ctx, r, r);
    REQUIRE(bc);
    CHECK(bc->clock == 0);
    CHECK(bc->b == 1);
  }
  SUBCASE("not in the future") {
    auto earlier = region_of(ctx, val(ctx, {0, q(3, 10)}));
    auto r = region_of(ctx, val(ctx, {1, q(13, 10)}));
    CHECK_FALSE(boundary_coordinates(ctx, r, earlier));
  }
  SUBCASE("target must be thin") {
    auto thick = region_of(ctx, val(ctx, {q(1, 2), q(1, 3)}));
    CHECK_THROWS_AS(boundary_coordinates(ctx, zero, thick), DomainError);
  }
  SUBCASE("every ν in r lands in the thin target after b - ν(c)") {
    oracle::RandomValuations gen(9);
    for (int i = 0; i < 200; ++i) {
      auto nu = gen.valuation(ctx, 8);
      auto r = region_of(ctx, nu);
      for (const auto& later : future_chain(ctx, r)) {
        if (!is_thin(later)) continue;
        auto bc = boundary_coordinates(ctx, r, later);
        REQUIRE(bc);
        Rational t = Rational(bc->b) - nu[bc->clock];
        CHECK(t >= 0);
        CHECK(oracle::signature(ctx, oracle::shifted(ctx, nu, t)) ==
              oracle::signature(ctx, representative(ctx, later)));
      }
    }
  }
}

TEST_CASE("diag_leq") {
  const auto ctx = xy2();
  auto t = diag_leq(val(ctx, {q(1, 5), q(1, 2)}), val(ctx, {q(7, 10), 1}));
  REQUIRE(t);
  CHECK(*t == q(1, 2));
  t = diag_leq(val(ctx, {q(1, 5), q(1, 2)}), val(ctx, {q(7, 10), q(1, 2)}));
  REQUIRE(t);
  CHECK(*t == q(1, 2));
  CHECK_FALSE(diag_leq(val(ctx, {q(1, 5), q(1, 2)}), val(ctx, {q(7, 10), q(9, 10)})));

  oracle::RandomValuations gen(31);
  for (int i = 0; i < 300; ++i) {
    auto nu = gen.valuation(ctx, 6);
    CHECK_FALSE(diag_leq(nu, nu));  // irreflexive
    Rational headroom = ctx.k() - std::max(nu[0], nu[1]);
    if (headroom > 0) {
      Rational step = headroom / 2;
      auto up = oracle::shifted(ctx, nu, step);
      auto d = diag_leq(nu, up);
      REQUIRE(d);
      CHECK(*d == step);
      CHECK_FALSE(diag_leq(up, nu));  // antisymmetric
      // same-support chains compose
      auto up2 = oracle::shifted(ctx, up, step / 2);
      auto d2 = diag_leq(nu, up2);
      REQUIRE(d2);
      CHECK(*d2 == step + step / 2);
    }
  }
}

TEST_CASE("closure membership and delay intervals") {
  const ClockContext ctx({"c"}, 2);
  auto thick12 = region_of(ctx, val(ctx, {q(3, 2)}));
  CHECK(in_closure(val(ctx, {1}), thick12));
  CHECK(in_closure(val(ctx, {2}), thick12));
  CHECK_FALSE(in_closure(val(ctx, {q(1, 2)}), thick12));

  auto iv = delays_into(ctx, val(ctx, {0}), thick12);
  REQUIRE(iv);
  CHECK(iv->lo == 1);
  CHECK(iv->hi == 2);
  CHECK_FALSE(iv->lo_closed);
  CHECK_FALSE(iv->hi_closed);

  iv = delays_into(ctx, val(ctx, {q(3, 2)}), thick12);
  REQUIRE(iv);
  CHECK(iv->lo == 0);
  CHECK(iv->lo_closed);
  CHECK(iv->hi == q(1, 2));

  CHECK_FALSE(delays_into(ctx, val(ctx, {2}), thick12));

  const auto ctx2 = xy2();
  auto r = region_of(ctx2, val(ctx2, {q(1, 4), q(1, 2)}));
  CHECK(in_closure(val(ctx2, {q(1, 2), q(1, 2)}), r));   // fractions may meet on the boundary
  CHECK_FALSE(in_closure(val(ctx2, {q(3, 4), q(1, 2)}), r));  // order may not flip
}
