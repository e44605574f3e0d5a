#include <benchmark/benchmark.h>

#include "rpcacc/reference.hpp"
#include "rpcacc/wire.hpp"
#include "rpcacc/workload.hpp"

using namespace rpcacc;

namespace {

Workload bench_workload(std::uint32_t depth_max, std::uint32_t size_max) {
  WorkloadSpec spec;
  spec.seed = 7;
  spec.request_count = 64;
  spec.class_count = 5;
  spec.depth_max = depth_max;
  spec.fields_min = 4;
  spec.fields_max = 10;
  spec.field_size_max = size_max;
  spec.repeated_probability = 0.15;
  return generate_workload(spec);
}

}  // namespace

static void BM_VarintEncode(benchmark::State& state) {
  wire::Bytes out;
  std::uint64_t v = 0;
  for (auto _ : state) {
    out.clear();
    wire::encode_varint(v, out);
    v = v * 6364136223846793005ull + 1442695040888963407ull;
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_VarintEncode);

static void BM_VarintDecode(benchmark::State& state) {
  std::vector<wire::Bytes> inputs;
  std::uint64_t v = 1;
  for (int i = 0; i < 64; ++i) {
    inputs.push_back(wire::encode_varint(v));
    v = v * 2862933555777941757ull + 3037000493ull;
  }
  std::size_t i = 0;
  for (auto _ : state) {
    auto r = wire::decode_varint(inputs[i++ % inputs.size()]);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_VarintDecode);

static void BM_RefEncode(benchmark::State& state) {
  Workload wl = bench_workload(static_cast<std::uint32_t>(state.range(0)), 512);
  std::size_t i = 0;
  std::uint64_t bytes = 0;
  for (auto _ : state) {
    const MessageValue& msg = wl.messages[i++ % wl.messages.size()];
    wire::Bytes out = ref_encode(msg, wl.table);
    bytes += out.size();
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_RefEncode)->Arg(1)->Arg(4)->Arg(8);

static void BM_RefDecode(benchmark::State& state) {
  Workload wl = bench_workload(static_cast<std::uint32_t>(state.range(0)), 512);
  std::vector<wire::Bytes> wires;
  std::vector<std::uint16_t> classes;
  for (const auto& m : wl.messages) {
    wires.push_back(ref_encode(m, wl.table));
    classes.push_back(m.class_id);
  }
  std::size_t i = 0;
  std::uint64_t bytes = 0;
  for (auto _ : state) {
    std::size_t k = i++ % wires.size();
    MessageValue msg = ref_decode(wires[k], classes[k], wl.table);
    bytes += wires[k].size();
    benchmark::DoNotOptimize(msg.slots.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_RefDecode)->Arg(1)->Arg(4)->Arg(8);
