#include <benchmark/benchmark.h>

#include "rpcacc/deserializer.hpp"
#include "rpcacc/reference.hpp"
#include "rpcacc/serializer.hpp"
#include "rpcacc/workload.hpp"

using namespace rpcacc;

namespace {

SimConfig bench_config() {
  SimConfig cfg;
  cfg.memory.host_pool_bytes = 16ull << 20;
  cfg.memory.accel_pool_bytes = 16ull << 20;
  return cfg;
}

Workload bench_workload(double acc_fraction) {
  WorkloadSpec spec;
  spec.seed = 11;
  spec.request_count = 64;
  spec.class_count = 4;
  spec.depth_max = 3;
  spec.fields_min = 6;
  spec.fields_max = 12;
  spec.field_size_max = 512;
  spec.small_fields = true;
  spec.acc_fraction = acc_fraction;
  spec.repeated_probability = 0.1;
  return generate_workload(spec);
}

}  // namespace

// Host-side wall time of the simulator itself (not simulated nanoseconds),
// per 64-message batch on a fresh machine.
static void BM_DeserializeBatch(benchmark::State& state) {
  Workload wl = bench_workload(0.25);
  std::vector<wire::Bytes> wires;
  for (const auto& m : wl.messages) wires.push_back(ref_encode(m, wl.table));
  DeserMode mode = state.range(0) == 0 ? DeserMode::kOneShot : DeserMode::kFieldByField;

  for (auto _ : state) {
    Simulation sim(bench_config(), wl.table);
    Deserializer deser(sim);
    for (std::size_t k = 0; k < wires.size(); ++k) {
      DeserResult r = deser.deserialize(wires[k], wl.messages[k].class_id, mode);
      benchmark::DoNotOptimize(r.metrics.elapsed_ns);
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(wires.size()));
}
BENCHMARK(BM_DeserializeBatch)->Arg(0)->Arg(1);

static void BM_SerializeStrategy(benchmark::State& state) {
  Workload wl = bench_workload(0.25);
  Simulation sim(bench_config(), wl.table);
  Deserializer deser(sim);
  Serializer ser(sim);
  std::vector<DeserResult> placed;
  for (const auto& m : wl.messages) {
    placed.push_back(deser.deserialize(ref_encode(m, wl.table), m.class_id, DeserMode::kOneShot));
  }
  Strategy strategy = static_cast<Strategy>(state.range(0));
  std::size_t i = 0;
  for (auto _ : state) {
    SerializeResult r = ser.serialize(placed[i++ % placed.size()].root, strategy);
    benchmark::DoNotOptimize(r.wire.data());
  }
}
BENCHMARK(BM_SerializeStrategy)
    ->Arg(static_cast<int>(Strategy::kCpuOnly))
    ->Arg(static_cast<int>(Strategy::kAccelOnly))
    ->Arg(static_cast<int>(Strategy::kMemoryAffinity));

BENCHMARK_MAIN();
