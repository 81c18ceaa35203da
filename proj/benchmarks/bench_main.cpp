#include <benchmark/benchmark.h>

#include "chipletsim/calibrate.hpp"
#include "chipletsim/cache.hpp"
#include "chipletsim/mesh.hpp"
#include "chipletsim/system.hpp"

namespace {

void BM_KernelScheduleDrain(benchmark::State& state) {
  struct Sink : csim::Component {
    void on_event(const csim::Event&) override {}
  };
  for (auto _ : state) {
    csim::Kernel kernel;
    Sink sink;
    const csim::ComponentId id = kernel.add_component(&sink);
    for (int i = 0; i < state.range(0); ++i)
      kernel.schedule(static_cast<csim::SimTime>(i % 97), id, 0, 0);
    benchmark::DoNotOptimize(kernel.run());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KernelScheduleDrain)->Arg(1 << 12)->Arg(1 << 16);

void BM_CacheAccess(benchmark::State& state) {
  csim::CacheSpec spec{32 * 1024, 64, 8, 2};
  csim::SetAssocCache cache(spec, 500);
  std::uint64_t addr = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cache.access(addr, false));
    addr += 64;
    addr %= 1 << 20;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CacheAccess);

void BM_MeshTransfer(benchmark::State& state) {
  csim::MeshFabric fabric(csim::MeshDims{5, 5}, 2, 1000);
  csim::SimTime t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fabric.transfer(80, {0, 0}, {4, 4}, t));
    t += 1000;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_MeshTransfer);

void BM_PresetRun(benchmark::State& state) {
  const csim::SystemSpec spec = csim::preset("exp1");
  for (auto _ : state) {
    auto instance = csim::build_system(spec);
    benchmark::DoNotOptimize(instance->run());
  }
}
BENCHMARK(BM_PresetRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
