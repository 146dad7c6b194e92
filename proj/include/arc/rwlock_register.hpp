#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <memory>
#include <span>
#include <utility>

#include "arc/content_buffer.hpp"
#include "arc/payload.hpp"
#include "arc/register.hpp"

namespace arc {

/// Reader-writer spinlock with writer preference, built on RMW instructions.
/// Bit 31 is the writer bit, the low bits count readers inside. A reader that
/// enters while the writer bit is set backs out, so a waiting writer drains
/// the readers instead of being starved by them. Not wait-free.
class RwSpinLock {
 public:
  static constexpr std::uint32_t kWriterBit = 0x8000'0000u;

  /// Each function returns the number of RMW instructions it executed.
  std::uint64_t lock_shared() noexcept;
  std::uint64_t unlock_shared() noexcept;
  std::uint64_t lock() noexcept;
  std::uint64_t unlock() noexcept;

 private:
  alignas(64) std::atomic<std::uint32_t> state_{0};
};

/// Single buffer guarded by RwSpinLock.
class RwlockRegister {
 public:
  static constexpr RegisterKind kKind = RegisterKind::kRwlock;

  class Reader {
   public:
    Reader(Reader&&) noexcept = default;
    Reader& operator=(Reader&&) noexcept = default;
    std::uint32_t id() const noexcept { return id_; }

   private:
    friend class RwlockRegister;
    Reader(std::uint32_t id, detail::OwnerCounters* counters) : id_(id), counters_(counters) {}
    std::uint32_t id_;
    detail::OwnerCounters* counters_;
    BufferStats scratch_stats_;
    ContentBuffer scratch_;  // allocated on first read()
    std::size_t scratch_size_ = 0;
  };

  class Writer {
   public:
    Writer(Writer&&) noexcept = default;
    Writer& operator=(Writer&&) noexcept = default;

   private:
    friend class RwlockRegister;
    Writer() = default;
  };

  RwlockRegister(Payload initial, std::uint32_t readers, std::size_t max_size);

  RwlockRegister(const RwlockRegister&) = delete;
  RwlockRegister& operator=(const RwlockRegister&) = delete;

  Reader make_reader();
  Writer make_writer();

  /// Copies the value into the reader's private buffer under the read lock.
  std::span<const std::byte> read(Reader& reader);

  /// Calls fn with the shared buffer while holding the read lock.
  template <class Fn>
  decltype(auto) visit(Reader& reader, Fn&& fn) {
    struct Unlock {
      RwSpinLock& lock;
      detail::OwnerCounters& c;
      std::uint64_t rmw;
      ~Unlock() {
        rmw += lock.unlock_shared();
        detail::bump(c.ops);
        detail::bump(c.rmw, rmw);
        detail::raise_to(c.max_rmw_per_op, rmw);
      }
    };
    Unlock unlock{lock_, *reader.counters_, lock_.lock_shared()};
    return std::forward<Fn>(fn)(content_.view(size_));
  }

  void write(Writer& writer, Payload value);

  RmwCounters rmw_counters() const noexcept;
  RegisterStats stats() const noexcept;
  BufferStats buffer_stats() const noexcept { return buffers_stats_; }
  std::size_t max_size() const noexcept { return max_size_; }
  std::uint32_t reader_capacity() const noexcept { return readers_; }

 private:
  std::uint32_t readers_;
  std::size_t max_size_;
  BufferStats buffers_stats_;
  ContentBuffer content_;
  std::size_t size_ = 0;
  RwSpinLock lock_;
  std::unique_ptr<detail::OwnerCounters[]> reader_counters_;
  detail::OwnerCounters writer_counters_;
  std::atomic<std::uint32_t> readers_made_{0};
  std::atomic<bool> writer_made_{false};
};

static_assert(SwmrRegister<RwlockRegister>);

}  // namespace arc
