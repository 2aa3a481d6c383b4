#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hart/estimation.hpp"
#include "hart/model.hpp"
#include "hart/oracle_calc.hpp"
#include "hart/procedures.hpp"
#include "hart/sim.hpp"

namespace {

std::vector<hart::TestItem> make_items(std::size_t m) {
  hart::ScenarioConfig cfg;
  cfg.model.pi = 0.1;
  cfg.model.effect = hart::PointMass{2.0};
  cfg.model.scale = hart::UniformScale{0.5, 4.0};
  cfg.m = m;
  cfg.seed = 17;
  return hart::generate_scenario(cfg, 0).first;
}

void BM_kde_self_eval(benchmark::State& state) {
  const std::size_t m = std::size_t(state.range(0));
  const auto items = make_items(m);
  std::vector<double> x(m), s(m), w(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = items[i].x;
    s[i] = items[i].sigma;
  }
  const hart::Bandwidths h = hart::silverman_bandwidths(items);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hart::detail::kde_self_eval(x, s, w, h, true));
  }
  state.SetComplexityN(int64_t(m));
}
BENCHMARK(BM_kde_self_eval)->Arg(500)->Arg(1000)->Arg(2000)->Arg(4000)
    ->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

void BM_estimate_tstats(benchmark::State& state) {
  const auto items = make_items(std::size_t(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hart::estimate_tstats(items));
  }
}
BENCHMARK(BM_estimate_tstats)->Arg(1000)->Arg(2000)->Arg(5000)
    ->Unit(benchmark::kMillisecond);

void BM_step_up(benchmark::State& state) {
  const std::size_t m = std::size_t(state.range(0));
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> t(m);
  for (auto& v : t) v = u(eng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hart::step_up(t, 0.1));
  }
}
BENCHMARK(BM_step_up)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void BM_generate_scenario(benchmark::State& state) {
  hart::ScenarioConfig cfg;
  cfg.model.pi = 0.1;
  cfg.model.effect = hart::PointMass{2.0};
  cfg.model.scale = hart::UniformScale{0.0, 4.0};
  cfg.m = std::size_t(state.range(0));
  std::size_t rep = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hart::generate_scenario(cfg, rep++));
  }
}
BENCHMARK(BM_generate_scenario)->Arg(10000)->Arg(100000)
    ->Unit(benchmark::kMillisecond);

void BM_toy_report(benchmark::State& state) {
  hart::ToyModel model;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hart::toy_report(model));
  }
}
BENCHMARK(BM_toy_report)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
