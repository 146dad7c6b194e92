#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>

#include "arc/content_buffer.hpp"
#include "arc/payload.hpp"
#include "arc/register.hpp"

namespace arc {

/// Peterson's (1,N) concurrent-reading-while-writing register, built only
/// from loads, stores and fences.
///
/// Shared state: two main buffers, a writer flag, a switch bit, and per reader
/// a READING/WRITING flag pair plus a private copy buffer. The writer fills
/// BUFF1 under the flag, toggles the switch, hands a copy to every reader that
/// started a read since it was last served, then fills BUFF2. A reader copies
/// BUFF1 and BUFF2 (two full copies per read) and returns its private copy if
/// the writer served it, else BUFF2 if it saw writer activity around the
/// BUFF1 copy, else BUFF1.
///
/// Buffers read while possibly being written are copied with relaxed 64-bit
/// atomic accesses; sequential consistency is restored with explicit fences.
class PetersonRegister {
 public:
  static constexpr RegisterKind kKind = RegisterKind::kPeterson;

  class Reader {
   public:
    Reader(Reader&&) noexcept = default;
    Reader& operator=(Reader&&) noexcept = default;
    std::uint32_t id() const noexcept { return id_; }

   private:
    friend class PetersonRegister;
    Reader(std::uint32_t id, std::size_t max_size);
    std::uint32_t id_;
    BufferStats scratch_stats_;
    ContentBuffer first_;
    ContentBuffer second_;
  };

  class Writer {
   public:
    Writer(Writer&&) noexcept = default;
    Writer& operator=(Writer&&) noexcept = default;

   private:
    friend class PetersonRegister;
    Writer() = default;
  };

  PetersonRegister(Payload initial, std::uint32_t readers, std::size_t max_size);

  PetersonRegister(const PetersonRegister&) = delete;
  PetersonRegister& operator=(const PetersonRegister&) = delete;

  Reader make_reader();
  Writer make_writer();

  /// View into the reader's own buffers; valid until its next read.
  std::span<const std::byte> read(Reader& reader) noexcept;
  void write(Writer& writer, Payload value);

  RmwCounters rmw_counters() const noexcept { return {}; }
  RegisterStats stats() const noexcept;
  /// Shared buffers only: BUFF1, BUFF2 and one copy buffer per reader.
  BufferStats buffer_stats() const noexcept { return buffers_stats_; }
  std::size_t max_size() const noexcept { return max_size_; }
  std::uint32_t reader_capacity() const noexcept { return readers_; }

 private:
  struct alignas(64) ReaderShared {
    std::atomic<bool> reading{false};
    std::atomic<bool> writing{false};  // written by the writer only
    std::size_t copy_size = 0;
    ContentBuffer copy;
    std::atomic<std::uint64_t> reads{0};
  };

  std::uint32_t readers_;
  std::size_t max_size_;
  BufferStats buffers_stats_;
  std::unique_ptr<ReaderShared[]> shared_;
  ContentBuffer first_;
  ContentBuffer second_;
  alignas(64) std::atomic<std::uint64_t> first_size_{0};
  std::atomic<std::uint64_t> second_size_{0};
  alignas(64) std::atomic<bool> writer_flag_{false};
  std::atomic<bool> switch_{false};
  std::atomic<std::uint64_t> writes_{0};
  std::atomic<std::uint32_t> readers_made_{0};
  std::atomic<bool> writer_made_{false};
};

static_assert(SwmrRegister<PetersonRegister>);

}  // namespace arc
