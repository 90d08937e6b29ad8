#include <benchmark/benchmark.h>

#include "apla/digraph.hpp"
#include "apla/dynamics.hpp"
#include "apla/montecarlo.hpp"
#include "apla/rng.hpp"
#include "apla/stability.hpp"

namespace {

apla::Game uniform_game(std::size_t players, std::size_t actions) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < players; ++i) total *= actions;
  std::vector<std::vector<double>> u(players, std::vector<double>(total));
  for (std::size_t i = 0; i < players; ++i) {
    for (std::size_t p = 0; p < total; ++p) u[i][p] = 1.0 + static_cast<double>((p * 7 + i * 3) % 5);
  }
  return apla::Game(std::vector<std::size_t>(players, actions), u);
}

void BM_AdvanceStagHunt(benchmark::State& state) {
  const apla::Game game = apla::coordination_game(5, 1, 3, 4);
  const apla::Params params;
  apla::CounterRng rng(1, 0);
  apla::SystemState s = apla::pure_strategy_state(game, apla::ProfileId{0});
  for (auto _ : state) {
    apla::advance(game, s, params, rng);
    benchmark::DoNotOptimize(s.last_profile);
  }
}
BENCHMARK(BM_AdvanceStagHunt);

void BM_StepRound(benchmark::State& state) {
  const apla::Game game = apla::coordination_game(5, 1, 3, 4);
  const apla::Params params;
  apla::CounterRng rng(1, 0);
  apla::SystemState s = apla::pure_strategy_state(game, apla::ProfileId{0});
  for (auto _ : state) {
    s = apla::step_round(game, s, params, rng);
    benchmark::DoNotOptimize(s.time);
  }
}
BENCHMARK(BM_StepRound);

void BM_MinResistance(benchmark::State& state) {
  const auto players = static_cast<std::size_t>(state.range(0));
  const apla::Game game = uniform_game(players, 2);
  apla::Params params;
  params.mode = apla::Mode::PLA;
  params.epsilon = 0.05;
  const auto digraph = apla::build_digraph(game, params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(apla::min_resistances(digraph));
  }
}
BENCHMARK(BM_MinResistance)->DenseRange(2, 6);

void BM_Stationary(benchmark::State& state) {
  const apla::Game game = uniform_game(3, 2);
  apla::Params params;
  params.mode = apla::Mode::PLA;
  params.epsilon = 0.05;
  const auto digraph = apla::build_digraph(game, params);
  const auto mode = state.range(0) == 0 ? apla::ChainMode::TreeSum : apla::ChainMode::Solver;
  for (auto _ : state) {
    benchmark::DoNotOptimize(apla::fw_stationary(digraph, mode));
  }
}
BENCHMARK(BM_Stationary)->Arg(0)->Arg(1);

void BM_Replicate(benchmark::State& state) {
  apla::ExperimentConfig config;
  config.horizon = 20000;
  config.runs = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(apla::run_replicate(config, 0));
  }
}
BENCHMARK(BM_Replicate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
