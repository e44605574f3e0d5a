#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "rpcacc/error.hpp"

namespace rpcacc {

enum class Region : std::uint8_t { kHost = 0, kAccel = 1 };

inline const char* region_name(Region r) { return r == Region::kHost ? "host" : "accel"; }

// Location of a dereference value inside simulated memory. addr == 0 means
// "absent": address 0 is never handed out by any allocator.
struct MemHandle {
  Region region = Region::kHost;
  std::uint64_t addr = 0;
  std::uint32_t len = 0;

  bool null() const { return addr == 0; }
  bool operator==(const MemHandle&) const = default;
};

// One region's backing store. The address space is flat:
//
//   [0, chunk_size)                       reserved (null page)
//   [chunk_size, chunk_size + pool)       4KB-chunk pool, free-list managed
//   [pool_end, ...)                       large-object zone, bump allocated
//
// The large zone exists because a single deserialized payload can exceed the
// chunk size; real hardware would scatter-gather, the simulation keeps such
// objects contiguous instead.
class MemorySpace {
 public:
  MemorySpace(Region region, std::uint64_t chunk_size, std::uint64_t pool_chunks,
              std::uint64_t large_capacity);

  Region region() const { return region_; }
  std::uint64_t chunk_size() const { return chunk_size_; }

  // Pops the oldest free chunk (FIFO) and zeroes it.
  std::uint64_t alloc_chunk();
  void free_chunk(std::uint64_t base);

  // Bump allocation for objects larger than one chunk; never freed.
  std::uint64_t alloc_large(std::uint64_t len);

  void write(std::uint64_t addr, std::span<const std::uint8_t> bytes);
  void read(std::uint64_t addr, std::span<std::uint8_t> out) const;
  std::vector<std::uint8_t> read(std::uint64_t addr, std::uint64_t len) const;

  bool is_allocated(std::uint64_t addr, std::uint64_t len) const;

  std::uint64_t pool_chunks() const { return pool_chunks_; }
  std::uint64_t free_chunks() const { return free_list_.size(); }
  std::uint64_t outstanding_chunks() const { return pool_chunks_ - free_list_.size(); }
  std::uint64_t large_bytes_used() const { return large_cursor_; }

 private:
  void check_range(std::uint64_t addr, std::uint64_t len) const;
  std::uint64_t pool_base() const { return chunk_size_; }
  std::uint64_t pool_end() const { return chunk_size_ + pool_chunks_ * chunk_size_; }

  Region region_;
  std::uint64_t chunk_size_;
  std::uint64_t pool_chunks_;
  std::uint64_t large_capacity_;
  std::uint64_t large_cursor_ = 0;
  std::deque<std::uint64_t> free_list_;
  std::vector<bool> chunk_allocated_;
  std::vector<std::uint8_t> pool_store_;   // covers [0, pool_end)
  std::vector<std::uint8_t> large_store_;  // grows on demand
};

// Simple translation buffer: one contiguous virtual range maps onto one
// contiguous physical range. Anything outside is a miss, handled by the
// caller as an extra latency penalty rather than a fault. Until a mapping is
// installed the whole space translates identity with no misses, so the TLB
// is exercised only where a test or config asks for it.
class Tlb {
 public:
  explicit Tlb(std::uint64_t entries = 16384, std::uint64_t page_size = 4096)
      : capacity_(entries), page_size_(page_size) {}

  void install(std::uint64_t virt_base, std::uint64_t phys_base, std::uint64_t pages);

  struct Translation {
    std::uint64_t phys = 0;
    bool hit = false;
  };

  // Misses fall back to identity so simulations stay total.
  Translation translate(std::uint64_t virt_addr) const;

  std::uint64_t capacity() const { return capacity_; }
  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }

 private:
  std::uint64_t capacity_;
  std::uint64_t page_size_;
  bool mapped_ = false;
  std::uint64_t virt_base_ = 0;
  std::uint64_t phys_base_ = 0;
  std::uint64_t pages_ = 0;
  mutable std::uint64_t hits_ = 0;
  mutable std::uint64_t misses_ = 0;
};

struct MemoryConfig {
  std::uint64_t chunk_size = 4096;
  std::uint64_t host_pool_bytes = 64ull << 20;
  std::uint64_t accel_pool_bytes = 64ull << 20;
  std::uint64_t large_zone_bytes = 256ull << 20;
  std::uint64_t tlb_entries = 16384;
};

// The two address spaces plus the accelerator-side TLB over host memory.
class MemoryModel {
 public:
  explicit MemoryModel(const MemoryConfig& cfg = {});

  MemorySpace& space(Region r) { return r == Region::kHost ? host_ : accel_; }
  const MemorySpace& space(Region r) const { return r == Region::kHost ? host_ : accel_; }

  std::uint64_t alloc_chunk(Region r) { return space(r).alloc_chunk(); }
  void free_chunk(Region r, std::uint64_t base) { space(r).free_chunk(base); }

  void write(Region r, std::uint64_t addr, std::span<const std::uint8_t> bytes) {
    space(r).write(addr, bytes);
  }
  std::vector<std::uint8_t> read(Region r, std::uint64_t addr, std::uint64_t len) const {
    return space(r).read(addr, len);
  }
  std::vector<std::uint8_t> read(const MemHandle& h) const { return read(h.region, h.addr, h.len); }

  bool is_allocated(const MemHandle& h) const {
    return !h.null() && space(h.region).is_allocated(h.addr, h.len);
  }

  Tlb& tlb() { return tlb_; }
  const Tlb& tlb() const { return tlb_; }

  std::uint64_t chunk_size() const { return host_.chunk_size(); }

 private:
  MemorySpace host_;
  MemorySpace accel_;
  Tlb tlb_;
};

}  // namespace rpcacc
