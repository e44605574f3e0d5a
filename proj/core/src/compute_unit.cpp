#include "rpcacc/compute_unit.hpp"

#include <algorithm>
#include <array>

namespace rpcacc {

wire::Bytes rle_compress(wire::ByteView in) {
  wire::Bytes out;
  std::size_t i = 0;
  while (i < in.size()) {
    std::uint8_t byte = in[i];
    std::size_t run = 1;
    while (i + run < in.size() && in[i + run] == byte && run < 255) ++run;
    out.push_back(static_cast<std::uint8_t>(run));
    out.push_back(byte);
    i += run;
  }
  return out;
}

wire::Bytes rle_decompress(wire::ByteView in) {
  wire::Bytes out;
  for (std::size_t i = 0; i + 1 < in.size(); i += 2) {
    out.insert(out.end(), in[i], in[i + 1]);
  }
  return out;
}

wire::Bytes xor_crypt(wire::ByteView in) {
  static constexpr std::array<std::uint8_t, 8> kKey = {0x5A, 0xC3, 0x96, 0x0F,
                                                       0x71, 0xE8, 0x2D, 0xB4};
  wire::Bytes out(in.begin(), in.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] ^= kKey[i % kKey.size()];
  }
  return out;
}

const Kernel* find_kernel(const std::string& type) {
  static const std::vector<Kernel> kKernels = {
      {"identity", [](wire::ByteView in) { return wire::Bytes(in.begin(), in.end()); }},
      {"compress", [](wire::ByteView in) { return rle_compress(in); }},
      {"decompress", [](wire::ByteView in) { return rle_decompress(in); }},
      {"crypt", [](wire::ByteView in) { return xor_crypt(in); }},
  };
  for (const auto& k : kKernels) {
    if (k.type == type) return &k;
  }
  return nullptr;
}

ComputeUnit::ComputeUnit(Simulation& sim, std::uint32_t id)
    : sim_(sim), id_(id), ring_entries_(sim.config().cu.ring_entries) {
  notify_ring_base_ = sim_.memory().alloc_chunk(Region::kHost);
  ring_entries_ = std::min<std::uint32_t>(
      ring_entries_, static_cast<std::uint32_t>(sim_.memory().chunk_size() / kNotifyEntryBytes));
}

double ComputeUnit::program(const Kernel* kernel) {
  if (outstanding_ != 0) {
    throw Error(ErrorCode::kCuBusy, "reprogram with tasks in flight on cu" + std::to_string(id_));
  }
  kernel_ = kernel;
  type_ = kernel == nullptr ? "none" : kernel->type;
  return sim_.config().cu.reprogram_us * 1000.0;
}

TaskEvent ComputeUnit::submit_task(const Descriptor& desc, double now) {
  if (kernel_ == nullptr) {
    throw Error(ErrorCode::kCuUnprogrammed, "cu" + std::to_string(id_) + " has no kernel loaded");
  }
  if (outstanding_ >= ring_entries_) {
    throw Error(ErrorCode::kRingFull, "descriptor ring full on cu" + std::to_string(id_));
  }
  MemHandle input{Region::kAccel, desc.input_addr, desc.input_size};
  MemHandle output{Region::kAccel, desc.output_addr, desc.output_buf_size};
  if (!sim_.memory().is_allocated(input) || !sim_.memory().is_allocated(output)) {
    throw Error(ErrorCode::kDescriptorInvalid, "descriptor ranges must be allocated");
  }
  std::uint64_t in_end = desc.input_addr + desc.input_size;
  std::uint64_t out_end = desc.output_addr + desc.output_buf_size;
  if (desc.input_addr < out_end && desc.output_addr < in_end) {
    throw Error(ErrorCode::kDescriptorInvalid, "input and output ranges overlap");
  }

  double submit_done = now + sim_.link().mmio_write(0xC0 + id_, desc.input_addr);

  // The unit picks the descriptor up when idle, reads input from local
  // memory, runs the kernel, and writes the result locally.
  double start = std::max(submit_done, busy_until_);
  auto input_bytes = sim_.memory().read(input);
  wire::Bytes result = kernel_->transform(input_bytes);
  double compute_ns =
      static_cast<double>(desc.input_size) / sim_.config().cu.kernel_throughput_bytes_per_ns;

  TaskEvent event;
  event.ring_slot = next_slot_;
  event.notify_addr = notify_ring_base_ + next_slot_ * kNotifyEntryBytes;
  next_slot_ = (next_slot_ + 1) % ring_entries_;

  if (result.size() > desc.output_buf_size) {
    event.error = true;
    event.result_len = 0;
  } else {
    sim_.memory().write(Region::kAccel, desc.output_addr, result);
    event.result_len = static_cast<std::uint32_t>(result.size());
  }

  // Completion: result length and done flag land in the notification entry
  // with one DMA write.
  std::uint8_t entry[kNotifyEntryBytes] = {0};
  entry[0] = 1;  // done
  entry[1] = event.error ? 1 : 0;
  for (int i = 0; i < 4; ++i) entry[4 + i] = static_cast<std::uint8_t>(event.result_len >> (8 * i));
  double notify_ns = sim_.link().dma_write(event.notify_addr, entry);

  event.completion_ns = start + compute_ns + notify_ns;
  busy_until_ = event.completion_ns;
  ++outstanding_;
  return event;
}

double ComputeUnit::poll(const TaskEvent& event, double now) {
  if (outstanding_ > 0) --outstanding_;
  return std::max(now, event.completion_ns);
}

}  // namespace rpcacc
