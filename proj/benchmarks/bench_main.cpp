#include <benchmark/benchmark.h>

#include "bbm/bbm_engine.hpp"
#include "bbm/doa.hpp"
#include "bbm/fkpp.hpp"
#include "bbm/initial_conditions.hpp"

namespace {

void SimulateBbm(benchmark::State& state) {
  bbm::EvolveConfig cfg;
  cfg.horizon = static_cast<double>(state.range(0));
  cfg.barrier_gap = 30.0;
  cfg.seed = 42;
  std::uint64_t rep = 0;
  for (auto _ : state) {
    cfg.seed = 42 + rep++;
    auto cloud = bbm::simulate_bbm(cfg);
    benchmark::DoNotOptimize(cloud.positions.data());
    state.counters["particles"] = static_cast<double>(cloud.positions.size());
  }
}
BENCHMARK(SimulateBbm)->Arg(4)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void FkppSolve(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) {
    auto field = bbm::solve_fkpp(bbm::InitialProfile::heaviside(), t);
    benchmark::DoNotOptimize(field.u.data());
  }
}
BENCHMARK(FkppSolve)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void SampleAbk(benchmark::State& state) {
  bbm::InitialSpec spec;
  spec.window_depth = static_cast<double>(state.range(0));
  const bbm::PppSampler sampler(spec);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto eta = sampler.sample(seed++);
    benchmark::DoNotOptimize(eta.atoms().data());
    state.counters["atoms"] = static_cast<double>(eta.atom_count());
  }
}
BENCHMARK(SampleAbk)->Arg(20)->Arg(40)->Arg(60)->Unit(benchmark::kMillisecond);

void RStat(benchmark::State& state) {
  bbm::InitialSpec spec;
  spec.window_depth = 40.0;
  const bbm::PppSampler sampler(spec);
  const bbm::PointMeasure eta = sampler.sample(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(bbm::r_stat(eta, 50.0));
  }
}
BENCHMARK(RStat);

}  // namespace

BENCHMARK_MAIN();
