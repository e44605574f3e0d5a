#pragma once

#include <memory>
#include <vector>

#include "rpcacc/compute_unit.hpp"
#include "rpcacc/deserializer.hpp"
#include "rpcacc/report.hpp"
#include "rpcacc/runtime.hpp"
#include "rpcacc/serializer.hpp"
#include "rpcacc/simulation.hpp"
#include "rpcacc/workload.hpp"

namespace rpcacc {

// Request handler applied between deserialization and response
// serialization. Echo responds with the request object; ImageCompression is
// the compression-service flow (host auth kernel, compression on the CU when
// available, host fallback otherwise).
enum class AppKind { kEcho, kImageCompression };

struct PipelineOptions {
  DeserMode deser_mode = DeserMode::kOneShot;
  Strategy strategy = Strategy::kMemoryAffinity;
  AppKind app = AppKind::kEcho;
};

struct RequestOutcome {
  RequestRow row;
  wire::Bytes response_wire;
  std::uint16_t response_class = 0;
  DeserResult deser;
};

// End-to-end request path: arrival, target-aware deserialization, host/CU
// kernels, response serialization. Requests are processed sequentially on
// one simulated machine; the transport boundary on both sides is free.
class Pipeline {
 public:
  Pipeline(const SimConfig& cfg, SchemaTable table);

  Simulation& sim() { return *sim_; }
  Deserializer& deserializer() { return *deser_; }
  Serializer& serializer() { return *ser_; }
  HostRuntime& runtime() { return *runtime_; }
  ComputeUnit& cu(std::size_t i = 0) { return *cus_.at(i); }

  // Loads a built-in kernel by type name, or "none" to model a preempted
  // unit. Reprogram time is charged to the simulation clock.
  void set_cu_kernel(const std::string& type);

  RequestOutcome run_request(std::uint32_t id, wire::ByteView request_wire,
                             std::uint16_t class_id, const PipelineOptions& opts);

  SimReport run(const Workload& workload, const PipelineOptions& opts);

  struct StreamResult {
    double makespan_ns = 0.0;
    std::uint64_t total_wire_bytes = 0;
    std::vector<DeserMetrics> per_message;

    double throughput_bytes_per_ns() const {
      return makespan_ns > 0 ? static_cast<double>(total_wire_bytes) / makespan_ns : 0.0;
    }
  };

  // Deserialization-only stream schedule: lanes overlap their decode work,
  // link transfers serialize in submission order. Memory effects still apply.
  StreamResult deserialize_stream(const std::vector<wire::Bytes>& wires,
                                  const std::vector<std::uint16_t>& class_ids, DeserMode mode);

 private:
  RequestOutcome image_compression_request(std::uint32_t id, wire::ByteView request_wire,
                                           std::uint16_t class_id, const PipelineOptions& opts);

  std::unique_ptr<Simulation> sim_;
  std::unique_ptr<Deserializer> deser_;
  std::unique_ptr<Serializer> ser_;
  std::unique_ptr<HostRuntime> runtime_;
  std::vector<std::unique_ptr<ComputeUnit>> cus_;
};

}  // namespace rpcacc
