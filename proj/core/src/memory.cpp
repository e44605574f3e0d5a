#include "rpcacc/memory.hpp"

#include <algorithm>
#include <cstring>

namespace rpcacc {

MemorySpace::MemorySpace(Region region, std::uint64_t chunk_size, std::uint64_t pool_chunks,
                         std::uint64_t large_capacity)
    : region_(region),
      chunk_size_(chunk_size),
      pool_chunks_(pool_chunks),
      large_capacity_(large_capacity) {
  if (chunk_size_ == 0 || pool_chunks_ == 0) {
    throw Error(ErrorCode::kConfigError, "memory region needs a nonzero chunk pool");
  }
  pool_store_.resize(pool_end());
  chunk_allocated_.resize(pool_chunks_, false);
  for (std::uint64_t i = 0; i < pool_chunks_; ++i) {
    free_list_.push_back(pool_base() + i * chunk_size_);
  }
}

std::uint64_t MemorySpace::alloc_chunk() {
  if (free_list_.empty()) {
    throw Error(ErrorCode::kOutOfChunks, std::string(region_name(region_)) + " chunk pool empty");
  }
  std::uint64_t base = free_list_.front();
  free_list_.pop_front();
  std::uint64_t idx = (base - pool_base()) / chunk_size_;
  chunk_allocated_[idx] = true;
  std::memset(pool_store_.data() + base, 0, chunk_size_);
  return base;
}

void MemorySpace::free_chunk(std::uint64_t base) {
  if (base < pool_base() || base >= pool_end() || (base - pool_base()) % chunk_size_ != 0) {
    throw Error(ErrorCode::kOutOfBounds, "free of a non-chunk address");
  }
  std::uint64_t idx = (base - pool_base()) / chunk_size_;
  if (!chunk_allocated_[idx]) {
    throw Error(ErrorCode::kUnallocatedAccess, "double free of chunk");
  }
  chunk_allocated_[idx] = false;
  free_list_.push_back(base);
}

std::uint64_t MemorySpace::alloc_large(std::uint64_t len) {
  if (large_cursor_ + len > large_capacity_) {
    throw Error(ErrorCode::kOutOfChunks,
                std::string(region_name(region_)) + " large-object zone exhausted");
  }
  std::uint64_t addr = pool_end() + large_cursor_;
  large_cursor_ += len;
  if (large_store_.size() < large_cursor_) {
    large_store_.resize(large_cursor_);
  }
  return addr;
}

void MemorySpace::check_range(std::uint64_t addr, std::uint64_t len) const {
  if (len == 0) return;
  std::uint64_t end = addr + len;
  if (end < addr) throw Error(ErrorCode::kOutOfBounds, "address range wraps");
  if (addr >= pool_base() && end <= pool_end()) {
    // Every covered chunk must be live; ranges may span adjacent chunks.
    std::uint64_t first = (addr - pool_base()) / chunk_size_;
    std::uint64_t last = (end - 1 - pool_base()) / chunk_size_;
    for (std::uint64_t i = first; i <= last; ++i) {
      if (!chunk_allocated_[i]) {
        throw Error(ErrorCode::kUnallocatedAccess,
                    std::string(region_name(region_)) + " chunk at index " + std::to_string(i));
      }
    }
    return;
  }
  if (addr >= pool_end() && end <= pool_end() + large_cursor_) {
    return;  // inside the bump-allocated prefix of the large zone
  }
  if (end <= chunk_size_) {
    throw Error(ErrorCode::kUnallocatedAccess, "null page access");
  }
  throw Error(ErrorCode::kOutOfBounds, std::string(region_name(region_)) + " address " +
                                           std::to_string(addr) + " len " + std::to_string(len));
}

void MemorySpace::write(std::uint64_t addr, std::span<const std::uint8_t> bytes) {
  check_range(addr, bytes.size());
  if (bytes.empty()) return;
  if (addr + bytes.size() <= pool_end()) {
    std::memcpy(pool_store_.data() + addr, bytes.data(), bytes.size());
  } else {
    std::memcpy(large_store_.data() + (addr - pool_end()), bytes.data(), bytes.size());
  }
}

void MemorySpace::read(std::uint64_t addr, std::span<std::uint8_t> out) const {
  check_range(addr, out.size());
  if (out.empty()) return;
  if (addr + out.size() <= pool_end()) {
    std::memcpy(out.data(), pool_store_.data() + addr, out.size());
  } else {
    std::memcpy(out.data(), large_store_.data() + (addr - pool_end()), out.size());
  }
}

std::vector<std::uint8_t> MemorySpace::read(std::uint64_t addr, std::uint64_t len) const {
  std::vector<std::uint8_t> out(len);
  read(addr, std::span<std::uint8_t>(out));
  return out;
}

bool MemorySpace::is_allocated(std::uint64_t addr, std::uint64_t len) const {
  try {
    check_range(addr, len);
    return true;
  } catch (const Error&) {
    return false;
  }
}

void Tlb::install(std::uint64_t virt_base, std::uint64_t phys_base, std::uint64_t pages) {
  if (pages > capacity_) {
    throw Error(ErrorCode::kConfigError, "mapping exceeds TLB capacity");
  }
  mapped_ = true;
  virt_base_ = virt_base;
  phys_base_ = phys_base;
  pages_ = pages;
}

Tlb::Translation Tlb::translate(std::uint64_t virt_addr) const {
  if (!mapped_) {
    ++hits_;
    return {virt_addr, true};
  }
  if (virt_addr >= virt_base_ && virt_addr < virt_base_ + pages_ * page_size_) {
    ++hits_;
    return {phys_base_ + (virt_addr - virt_base_), true};
  }
  ++misses_;
  return {virt_addr, false};
}

MemoryModel::MemoryModel(const MemoryConfig& cfg)
    : host_(Region::kHost, cfg.chunk_size, cfg.host_pool_bytes / cfg.chunk_size,
            cfg.large_zone_bytes),
      accel_(Region::kAccel, cfg.chunk_size, cfg.accel_pool_bytes / cfg.chunk_size,
             cfg.large_zone_bytes),
      tlb_(cfg.tlb_entries, cfg.chunk_size) {}

}  // namespace rpcacc
