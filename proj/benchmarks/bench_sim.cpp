#include <benchmark/benchmark.h>

#include "kum/sim/sim.hpp"

namespace {

using namespace kum::sim;

Scenario foraging() {
  Scenario s;
  s.flakes = {{{40, 50}, Color::Green}, {{160, 60}, Color::Uncolored}, {{50, 155}, Color::Red},
              {{150, 150}, Color::Blue}, {{100, 25}, Color::Yellow}};
  return s;
}

void BM_FieldStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<double> chemo(static_cast<std::size_t>(n * n), 0.0);
  Flake f;
  f.id = 1;
  f.pos = {n / 3, n / 2};
  f.mass = 100;
  const std::vector<Flake> flakes{f};
  const Params p;
  for (auto _ : state) benchmark::DoNotOptimize(field_step(chemo, n, n, flakes, p));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_FieldStep)->Arg(100)->Arg(200);

// Ticks of a foraging run from a state warmed up past the first occupations.
void BM_SimStep(benchmark::State& state) {
  SimState warm = init_scenario(foraging());
  run_until(warm, 600);
  SimState st = warm;
  for (auto _ : state) {
    if (!st.running() || st.tick >= 1600) {
      state.PauseTiming();
      st = warm;
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(sim_step(st));
  }
}
BENCHMARK(BM_SimStep);

void BM_SimRun1000(benchmark::State& state) {
  const Scenario s = foraging();
  for (auto _ : state) {
    SimState st = init_scenario(s);
    run_until(st, 1000);
    benchmark::DoNotOptimize(st.events.size());
  }
}
BENCHMARK(BM_SimRun1000)->Unit(benchmark::kMillisecond);

}  // namespace
