#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rpcacc/simulation.hpp"
#include "rpcacc/wire.hpp"

namespace rpcacc {

// Offloaded RPC kernel: a deterministic bytes -> bytes transform plus the
// type label the host dispatches on.
struct Kernel {
  std::string type;
  std::function<wire::Bytes(wire::ByteView)> transform;
};

// Built-in toy kernels. The functions are also the oracles the tests run
// directly against CU output.
wire::Bytes rle_compress(wire::ByteView in);
wire::Bytes rle_decompress(wire::ByteView in);
wire::Bytes xor_crypt(wire::ByteView in);

const Kernel* find_kernel(const std::string& type);

struct Descriptor {
  std::uint64_t input_addr = 0;
  std::uint32_t input_size = 0;
  std::uint64_t output_addr = 0;
  std::uint32_t output_buf_size = 0;
};

struct TaskEvent {
  std::uint64_t notify_addr = 0;  // notification entry in host memory
  double completion_ns = 0.0;     // absolute simulated time incl. notification write
  std::uint32_t result_len = 0;
  bool error = false;
  std::uint32_t ring_slot = 0;
};

// One reconfigurable compute unit: descriptor ring in accelerator SRAM,
// notification ring in host memory, both consumed FIFO. Task data never
// crosses the link; the only interconnect events per task are the submit
// MMIO and the completion-notification DMA write.
class ComputeUnit {
 public:
  static constexpr std::uint32_t kNotifyEntryBytes = 16;

  ComputeUnit(Simulation& sim, std::uint32_t id);

  // Swaps the kernel (partial reconfiguration stand-in). Charges the
  // configured reprogram delay; rejected with CuBusy while tasks are in
  // flight. Passing nullptr models the unit being preempted/unavailable.
  double program(const Kernel* kernel);

  const std::string& type() const { return type_; }

  // Submits one descriptor (one MMIO write). Throws RingFull when the ring
  // holds ring_entries unretired tasks, DescriptorInvalid on bad ranges and
  // CuUnprogrammed when no kernel is loaded.
  TaskEvent submit_task(const Descriptor& desc, double now);

  // Busy-polls the event; returns the absolute completion time, never
  // before `now`.
  double poll(const TaskEvent& event, double now);

  std::uint32_t outstanding() const { return outstanding_; }

 private:
  Simulation& sim_;
  std::uint32_t id_;
  std::string type_ = "none";
  const Kernel* kernel_ = nullptr;
  std::uint64_t notify_ring_base_ = 0;
  std::uint32_t ring_entries_;
  std::uint32_t next_slot_ = 0;
  std::uint32_t outstanding_ = 0;
  double busy_until_ = 0.0;
};

}  // namespace rpcacc
