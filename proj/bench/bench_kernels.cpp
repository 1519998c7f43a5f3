// Serial reference vs OpenMP kernels. Set OMP_NUM_THREADS to vary the
// thread count of the _omp variants.

#include <random>

#include <benchmark/benchmark.h>

#include "ising/kernels.hpp"
#include "ising/sampler.hpp"

using namespace ising;

static kernels::CompiledModel model(int side) {
  std::mt19937_64 rng(side);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  Region box = make_box({0, 0}, side);
  std::map<Site, double> t;
  for (Site s : box.sites()) t[s] = u(rng);
  return kernels::compile(box, BoundaryCondition::minus(), ModelParams(1.0, 0.7, FieldSpec::table(t)));
}

template <double (*Kernel)(const kernels::CompiledModel&)>
static void run(benchmark::State& state) {
  const auto m = model(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(m));
  state.counters["sites"] = static_cast<double>(m.size());
}

BENCHMARK(run<kernels::log_partition_enumerate_serial>)->Name("enumerate/serial")->DenseRange(3, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(run<kernels::log_partition_enumerate_omp>)->Name("enumerate/omp")->DenseRange(3, 5)->Unit(benchmark::kMillisecond);
BENCHMARK(run<kernels::log_partition_transfer_serial>)->Name("transfer/serial")->Arg(6)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK(run<kernels::log_partition_transfer_omp>)->Name("transfer/omp")->Arg(6)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);

static void sampler_sweeps(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  Region box = make_box({0, 0}, side);
  ModelParams p(1.0, 0.5, FieldSpec::uniform(0.1));
  ChainConfig cfg;
  cfg.sweeps = 200;
  cfg.burn_in = 50;
  cfg.chains = 4;
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_magnetization(box, BoundaryCondition::plus(), p, cfg, {0, 0}).mean);
  state.SetItemsProcessed(state.iterations() * cfg.chains * cfg.sweeps * side * side);
}
BENCHMARK(sampler_sweeps)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
