#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "arc/content_buffer.hpp"
#include "arc/payload.hpp"
#include "arc/register.hpp"

namespace arc {

/// Readers-Field register: a 64-bit status word holding one presence bit per
/// reader (58 bits) and the current buffer index (top 6 bits).
///
/// A read sets the reader's bit with FetchAndOr and reads the buffer named by
/// the returned index. The writer swaps in a fresh word (new index, no bits)
/// and, for every bit set in the old word, records in that reader's field the
/// buffer it may still be reading. A buffer is reusable once it is neither
/// current nor named by any reader field, so N+2 buffers always leave one free.
class RfRegister {
 public:
  static constexpr RegisterKind kKind = RegisterKind::kRf;
  static constexpr std::uint32_t kMaxReaders = 58;
  static constexpr unsigned kIndexShift = 58;
  static constexpr std::uint64_t kMaskBits = (std::uint64_t{1} << kIndexShift) - 1;

  class Reader {
   public:
    Reader(Reader&&) noexcept = default;
    Reader& operator=(Reader&&) noexcept = default;
    std::uint32_t id() const noexcept { return id_; }

   private:
    friend class RfRegister;
    Reader(std::uint32_t id, detail::OwnerCounters* counters) : id_(id), counters_(counters) {}
    std::uint32_t id_;
    detail::OwnerCounters* counters_;
  };

  class Writer {
   public:
    Writer(Writer&&) noexcept = default;
    Writer& operator=(Writer&&) noexcept = default;

   private:
    friend class RfRegister;
    Writer() = default;
  };

  /// Throws CapacityError for readers outside 1..58.
  RfRegister(Payload initial, std::uint32_t readers, std::size_t max_size);

  RfRegister(const RfRegister&) = delete;
  RfRegister& operator=(const RfRegister&) = delete;

  Reader make_reader();
  Writer make_writer();

  /// View stays valid until this reader's next read.
  std::span<const std::byte> read(Reader& reader) noexcept;
  void write(Writer& writer, Payload value);

  RmwCounters rmw_counters() const noexcept;
  RegisterStats stats() const noexcept;
  BufferStats buffer_stats() const noexcept { return buffers_stats_; }
  std::size_t max_size() const noexcept { return max_size_; }
  std::uint32_t reader_capacity() const noexcept { return readers_; }
  std::uint32_t buffer_count() const noexcept { return static_cast<std::uint32_t>(buffers_.size()); }

 private:
  static constexpr std::uint8_t kNoTrace = 0xff;

  std::uint32_t pick_free_buffer() const noexcept;

  std::uint32_t readers_;
  std::size_t max_size_;
  BufferStats buffers_stats_;
  std::vector<ContentBuffer> buffers_;
  std::vector<std::size_t> sizes_;
  // Writer-owned: buffer each reader may still be reading.
  std::array<std::uint8_t, kMaxReaders> reader_fields_;
  std::uint32_t current_index_ = 0;
  std::unique_ptr<detail::OwnerCounters[]> reader_counters_;
  detail::OwnerCounters writer_counters_;
  std::atomic<std::uint32_t> readers_made_{0};
  std::atomic<bool> writer_made_{false};

  alignas(64) std::atomic<std::uint64_t> status_{0};
};

static_assert(SwmrRegister<RfRegister>);

}  // namespace arc
