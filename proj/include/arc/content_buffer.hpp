#pragma once

#include <cstddef>
#include <cstring>
#include <memory>
#include <new>
#include <span>

namespace arc {

/// Tally of content buffers a register allocated. Registers own one and route
/// every snapshot buffer through it so the N+2 bound is observable.
struct BufferStats {
  std::size_t count = 0;
  std::size_t bytes = 0;
};

/// Cache-line aligned, fixed-capacity byte buffer. Capacity is rounded up to a
/// whole number of 64-bit words so word-wise copies never run off the end.
class ContentBuffer {
 public:
  static constexpr std::size_t kAlignment = 64;

  ContentBuffer() = default;
  ContentBuffer(std::size_t capacity, BufferStats& stats)
      : capacity_(capacity),
        data_(static_cast<std::byte*>(
            ::operator new(rounded(capacity), std::align_val_t{kAlignment}))) {
    std::memset(data_.get(), 0, rounded(capacity));
    ++stats.count;
    stats.bytes += rounded(capacity);
  }

  std::byte* data() noexcept { return data_.get(); }
  const std::byte* data() const noexcept { return data_.get(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t word_count() const noexcept { return rounded(capacity_) / 8; }

  std::span<const std::byte> view(std::size_t size) const noexcept {
    return {data_.get(), size};
  }

 private:
  struct Deleter {
    void operator()(std::byte* p) const noexcept {
      ::operator delete(p, std::align_val_t{kAlignment});
    }
  };
  static constexpr std::size_t rounded(std::size_t n) noexcept {
    return n == 0 ? 8 : (n + 7) / 8 * 8;
  }

  std::size_t capacity_ = 0;
  std::unique_ptr<std::byte, Deleter> data_;
};

}  // namespace arc
