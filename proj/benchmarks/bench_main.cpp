#include <benchmark/benchmark.h>

#include "dyngame/equilibrium.hpp"
#include "dyngame/info_state.hpp"
#include "dyngame/paper_games.hpp"

using namespace dyngame;

static void BM_ForwardDistribution(benchmark::State& state) {
  RandomSizes s;
  s.horizon = static_cast<int>(state.range(0));
  GameSpec g = maskin_tirole_game(s);
  Histories hs = enumerate_histories(g);
  Profile p = uniform_profile(g, hs);
  for (auto _ : state) benchmark::DoNotOptimize(forward_distribution(g, hs, p));
}
BENCHMARK(BM_ForwardDistribution)->Arg(2)->Arg(3)->Arg(4);

static void BM_SolveExample3(benchmark::State& state) {
  Example ex = build_example("example3:c=0.2");
  for (auto _ : state) benchmark::DoNotOptimize(solve_k_based_bne(ex.game, ex.hs, ex.K));
}
BENCHMARK(BM_SolveExample3)->Unit(benchmark::kMillisecond);

static void BM_EnumerateExample3(benchmark::State& state) {
  Example ex = build_example("example3:c=0.2");
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_bne_small(ex.game, ex.hs));
}
BENCHMARK(BM_EnumerateExample3)->Unit(benchmark::kMillisecond);

static void BM_CheckUsiOuyang(benchmark::State& state) {
  Example ex = build_example("ouyang:seed=1");
  for (auto _ : state) benchmark::DoNotOptimize(check_usi(ex.game, ex.hs, 0, ex.K[0]));
}
BENCHMARK(BM_CheckUsiOuyang)->Unit(benchmark::kMillisecond);

static void BM_VerifySeExample1(benchmark::State& state) {
  Example ex = build_example("example1");
  const Profile& p = ex.strategies.at("E2");
  for (auto _ : state) benchmark::DoNotOptimize(verify_se_canonical(ex.game, ex.hs, p));
}
BENCHMARK(BM_VerifySeExample1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
