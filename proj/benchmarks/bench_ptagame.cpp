#include <benchmark/benchmark.h>

#include "ptagame/model_io.hpp"
#include "ptagame/quasi_simple.hpp"
#include "ptagame/simulation.hpp"

#include <string>

using namespace ptg;

namespace {

const Model& fixture(const std::string& name) {
  static std::map<std::string, Model> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, load_model(std::string(PTAGAME_FIXTURE_DIR) + "/" + name + ".json")).first;
  return it->second;
}

const char* name_of(int i) {
  static const char* names[] = {"M1", "M2", "M3", "M4"};
  return names[i];
}

void BM_RegionOf(benchmark::State& state) {
  const ClockContext ctx({"x", "y", "z"}, 2);
  const ClockValuation nu(ctx, {Rational(1, 3), Rational(7, 5), Rational(2)});
  for (auto _ : state) benchmark::DoNotOptimize(region_of(ctx, nu));
}
BENCHMARK(BM_RegionOf);

void BM_FutureChain(benchmark::State& state) {
  const ClockContext ctx({"x", "y", "z"}, 2);
  const auto r = ClockRegion::zero(ctx);
  for (auto _ : state) benchmark::DoNotOptimize(future_chain(ctx, r));
}
BENCHMARK(BM_FutureChain);

void BM_Explore(benchmark::State& state) {
  const auto& m = fixture(name_of(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(explore(m.arena, m.initial).size());
  state.SetLabel(m.name);
}
BENCHMARK(BM_Explore)->DenseRange(0, 3);

void BM_ValueIterate(benchmark::State& state) {
  const auto& m = fixture(name_of(static_cast<int>(state.range(0))));
  const Brg g = explore(m.arena, m.initial);
  for (auto _ : state) benchmark::DoNotOptimize(value_iterate(g).iterations);
  state.SetLabel(m.name);
}
BENCHMARK(BM_ValueIterate)->DenseRange(0, 3);

void BM_SolveExact(benchmark::State& state) {
  const auto& m = fixture(name_of(static_cast<int>(state.range(0))));
  const Brg g = explore(m.arena, m.initial);
  for (auto _ : state) benchmark::DoNotOptimize(solve_exact(g).certificate.ok);
  state.SetLabel(m.name);
}
BENCHMARK(BM_SolveExact)->DenseRange(0, 3);

void BM_ValueAtUncached(benchmark::State& state) {
  const auto& m = fixture("M4");
  const auto& ctx = m.arena.context();
  const ConcreteState s{m.initial.location, ClockValuation(ctx, {Rational(1, 3), Rational(1, 2)})};
  for (auto _ : state) benchmark::DoNotOptimize(value_at(m.arena, s));
}
BENCHMARK(BM_ValueAtUncached);

void BM_QuasiSimpleRegion(benchmark::State& state) {
  const auto& m = fixture("M2");
  const auto l0 = *m.arena.pta().find_location("l0");
  const auto r = region_of(m.arena.context(), ClockValuation(m.arena.context(), {Rational(1, 2)}));
  QuasiSimpleOptions opts;
  opts.pair_count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    ValueOracle o(m.arena);
    benchmark::DoNotOptimize(check_quasi_simple(o, l0, r, opts).passed());
  }
}
BENCHMARK(BM_QuasiSimpleRegion)->Arg(50)->Arg(200);

void BM_SimulateRun(benchmark::State& state) {
  const auto& m = fixture("M2");
  const Brg g = explore(m.arena, m.initial);
  const auto r = solve_exact(g);
  auto table = std::make_shared<const StrategyTable>(g, r.min, r.max);
  const ConcretizedStrategy min{table, Player::Min}, max{table, Player::Max};
  std::mt19937_64 rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_run(m.arena, min, max, m.initial, rng).steps);
}
BENCHMARK(BM_SimulateRun);

}  // namespace

BENCHMARK_MAIN();
