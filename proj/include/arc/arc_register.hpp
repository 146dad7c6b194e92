#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "arc/content_buffer.hpp"
#include "arc/errors.hpp"
#include "arc/payload.hpp"
#include "arc/register.hpp"

namespace arc {

// The shared synchronization word: slot index in the upper 32 bits, anonymous
// reader presence counter in the lower 32 bits.

constexpr std::uint64_t pack(std::uint32_t index, std::uint32_t counter) noexcept {
  return (std::uint64_t{index} << 32) | counter;
}

constexpr std::uint32_t index_of(std::uint64_t raw) noexcept {
  return static_cast<std::uint32_t>(raw >> 32);
}

constexpr std::uint32_t counter_of(std::uint64_t raw) noexcept {
  return static_cast<std::uint32_t>(raw & 0xffff'ffffu);
}

struct Unpacked {
  std::uint32_t index;
  std::uint32_t counter;
  friend bool operator==(const Unpacked&, const Unpacked&) = default;
};

constexpr Unpacked unpack(std::uint64_t raw) noexcept { return {index_of(raw), counter_of(raw)}; }

/// Largest reader count for which the presence counter cannot carry into the
/// index field.
inline constexpr std::uint64_t kMaxArcReaders = (std::uint64_t{1} << 32) - 2;

/// Order of the content copy relative to the publishing exchange. Only
/// kCopyThenPublish is correct; the other one exists so the verifier can be
/// shown to catch a broken register.
enum class WriteProtocol { kCopyThenPublish, kPublishThenCopy };

struct ArcOptions {
#ifdef NDEBUG
  static constexpr bool kAuditByDefault = false;
#else
  static constexpr bool kAuditByDefault = true;
#endif
  /// Check the slot accounting bound (sum of r_start - r_end over retired
  /// slots <= N) at the start of every write. Costs O(N) per write.
  bool audit = kAuditByDefault;
};

struct SlotState {
  std::uint32_t r_start;
  std::uint32_t r_end;
  std::size_t size;
};

namespace testing {
struct ArcPeer;
}

template <WriteProtocol Protocol>
class BasicArcRegister {
 public:
  static constexpr RegisterKind kKind = RegisterKind::kArc;
  static constexpr std::uint32_t kNoProposal = UINT32_MAX;

  class Reader {
   public:
    Reader(Reader&&) noexcept = default;
    Reader& operator=(Reader&&) noexcept = default;

    std::uint32_t id() const noexcept { return id_; }
    /// Slot this reader holds its presence unit on.
    std::uint32_t last_index() const noexcept { return last_index_; }

   private:
    friend class BasicArcRegister;
    friend struct testing::ArcPeer;
    Reader(std::uint32_t id, detail::OwnerCounters* counters) : id_(id), counters_(counters) {}

    std::uint32_t last_index_ = 0;
    std::uint32_t id_;
    detail::OwnerCounters* counters_;
  };

  class Writer {
   public:
    Writer(Writer&&) noexcept = default;
    Writer& operator=(Writer&&) noexcept = default;

    std::uint32_t last_slot() const noexcept { return last_slot_; }

   private:
    friend class BasicArcRegister;
    friend struct testing::ArcPeer;
    Writer() = default;

    std::uint32_t last_slot_ = 0;
  };

  /// INIT: N+2 slots, the initial value in slot 0, and current = N as if every
  /// reader had already started reading slot 0.
  BasicArcRegister(Payload initial, std::uint64_t readers, std::size_t max_size,
                   ArcOptions options = {})
      : readers_(validate_readers(readers)), max_size_(max_size), options_(options) {
    if (max_size == 0) throw ConfigError("max_size must be positive");
    check_size(initial.size());

    slot_count_ = readers_ + 2;
    slots_ = std::make_unique<Slot[]>(slot_count_);
    for (std::uint32_t i = 0; i < slot_count_; ++i) {
      slots_[i].content = ContentBuffer(max_size_, buffers_);
      slots_[i].size = 0;
    }
    std::memcpy(slots_[0].content.data(), initial.data(), initial.size());
    slots_[0].size = initial.size();
    reader_counters_ = std::make_unique<detail::OwnerCounters[]>(readers_);
    current_.store(pack(0, readers_), std::memory_order_release);  // I1
  }

  BasicArcRegister(const BasicArcRegister&) = delete;
  BasicArcRegister& operator=(const BasicArcRegister&) = delete;

  /// Throws CapacityError once N handles exist.
  Reader make_reader() {
    const std::uint64_t id = readers_made_.fetch_add(1, std::memory_order_relaxed);
    if (id >= readers_) {
      readers_made_.fetch_sub(1, std::memory_order_relaxed);
      throw CapacityError("register was built for " + std::to_string(readers_) + " readers");
    }
    return Reader(static_cast<std::uint32_t>(id), &reader_counters_[id]);
  }

  Writer make_writer() {
    if (writer_made_.exchange(true)) throw CapacityError("register already has its writer");
    return Writer();
  }

  /// The returned view stays valid until this reader's next read: the reader
  /// keeps a presence unit on the slot, so the writer cannot reuse it.
  std::span<const std::byte> read(Reader& reader) noexcept {
    detail::OwnerCounters& counters = *reader.counters_;
    detail::bump(counters.ops);

    const std::uint32_t index = index_of(current_.load(std::memory_order_acquire));  // R1
    if (reader.last_index_ == index) {
      const Slot& entry = slots_[reader.last_index_];
      return entry.content.view(entry.size);  // R2
    }

    const std::uint32_t released = reader.last_index_;
    slots_[released].r_end.fetch_add(1, std::memory_order_acq_rel);  // R3
    propose_free_slot(reader, released);
    const std::uint64_t tmp_curr = current_.fetch_add(1, std::memory_order_acq_rel) + 1;  // R4
    reader.last_index_ = index_of(tmp_curr);                                              // R5

    detail::bump(counters.rmw, 2);
    detail::raise_to(counters.max_rmw_per_op, 2);
    const Slot& entry = slots_[reader.last_index_];
    return entry.content.view(entry.size);
  }

  /// Throws ConfigError if the value is empty or larger than max_size; the
  /// register is untouched in that case.
  void write(Writer& writer, Payload value) {
    check_size(value.size());
    if (options_.audit) audit_accounting(writer);

    const std::uint32_t slot = find_free_slot(writer);  // W1
    Slot& target = slots_[slot];
    if constexpr (Protocol == WriteProtocol::kCopyThenPublish) {
      std::memcpy(target.content.data(), value.data(), value.size());
      target.size = value.size();
    }
    target.r_start.store(0, std::memory_order_relaxed);
    target.r_end.store(0, std::memory_order_relaxed);

    const std::uint64_t old_curr =
        current_.exchange(pack(slot, 0), std::memory_order_acq_rel);  // W2

    if constexpr (Protocol == WriteProtocol::kPublishThenCopy) {
      // Readers can already see this slot; they may observe a partial copy.
      target.size = value.size();
      std::memcpy(target.content.data(), value.data(), value.size());
    }

    const std::uint32_t old_slot = index_of(old_curr);
    const std::uint32_t frozen = counter_of(old_curr);
    if (frozen > readers_) detail::bump(writer_.counter_bound_violations);
    slots_[old_slot].r_start.store(frozen, std::memory_order_release);  // W3
    writer.last_slot_ = slot;

    detail::bump(writer_.ops);
    detail::bump(writer_.rmw);
  }

  /// W1. Tries the reader-posted proposal first, then scans upward from slot
  /// 0 for a slot other than last_slot with r_start == r_end. The proposal
  /// probe plus the scan examine at most N+2 slots in total.
  std::uint32_t find_free_slot(Writer& writer) noexcept {
    const std::uint32_t last = writer.last_slot_;
    std::uint64_t examined = 0;

    std::uint32_t rejected = kNoProposal;
    const std::uint32_t proposed = proposal_.load(std::memory_order_acquire);
    if (proposed != kNoProposal) {
      proposal_.store(kNoProposal, std::memory_order_relaxed);
      if (proposed != last && proposed < slot_count_) {
        ++examined;
        if (is_free(proposed)) {
          detail::bump(writer_.proposal_hits);
          detail::raise_to(writer_.max_scan_length, examined);
          return proposed;
        }
        rejected = proposed;
      }
    }

    for (std::uint32_t slot = 0; slot < slot_count_; ++slot) {
      if (slot == last || slot == rejected) continue;
      ++examined;
      if (is_free(slot)) {
        detail::raise_to(writer_.max_scan_length, examined);
        return slot;
      }
    }

    // Unreachable unless the accounting is broken: at least two slots are
    // always free, so at least one differs from last_slot.
    detail::bump(writer_.no_free_slot);
    std::fprintf(stderr, "arc: no free slot among %u (last_slot=%u)\n", slot_count_, last);
    std::abort();
  }

  /// Called right after a reader released `released_slot` (R3). If that
  /// release was the last one the slot was waiting for, post it as a hint for
  /// the writer's next W1.
  void propose_free_slot(const Reader&, std::uint32_t released_slot) noexcept {
    const Slot& slot = slots_[released_slot];
    const std::uint32_t r_end = slot.r_end.load(std::memory_order_acquire);
    if (r_end == slot.r_start.load(std::memory_order_acquire)) {
      proposal_.store(released_slot, std::memory_order_release);
    }
  }

  RmwCounters rmw_counters() const noexcept {
    RmwCounters out;
    for (std::uint32_t i = 0; i < readers_; ++i) {
      out.read_rmw += reader_counters_[i].rmw.load(std::memory_order_relaxed);
    }
    out.write_rmw = writer_.rmw.load(std::memory_order_relaxed);
    return out;
  }

  RegisterStats stats() const noexcept {
    RegisterStats out;
    for (std::uint32_t i = 0; i < readers_; ++i) {
      const auto& c = reader_counters_[i];
      out.reads += c.ops.load(std::memory_order_relaxed);
      out.rmw.read_rmw += c.rmw.load(std::memory_order_relaxed);
      out.max_read_rmw_per_op =
          std::max(out.max_read_rmw_per_op, c.max_rmw_per_op.load(std::memory_order_relaxed));
    }
    out.writes = writer_.ops.load(std::memory_order_relaxed);
    out.rmw.write_rmw = writer_.rmw.load(std::memory_order_relaxed);
    out.max_scan_length = writer_.max_scan_length.load(std::memory_order_relaxed);
    out.proposal_hits = writer_.proposal_hits.load(std::memory_order_relaxed);
    out.no_free_slot = writer_.no_free_slot.load(std::memory_order_relaxed);
    out.lemma_violations = writer_.lemma_violations.load(std::memory_order_relaxed);
    out.counter_bound_violations =
        writer_.counter_bound_violations.load(std::memory_order_relaxed);
    return out;
  }

  BufferStats buffer_stats() const noexcept { return buffers_; }
  std::size_t max_size() const noexcept { return max_size_; }
  std::uint32_t reader_capacity() const noexcept { return readers_; }
  std::uint32_t slot_count() const noexcept { return slot_count_; }
  std::uint64_t current_raw() const noexcept { return current_.load(std::memory_order_acquire); }

  SlotState slot_state(std::uint32_t slot) const noexcept {
    const Slot& s = slots_[slot];
    return {s.r_start.load(std::memory_order_acquire), s.r_end.load(std::memory_order_acquire),
            s.size};
  }

  std::optional<std::uint32_t> proposal() const noexcept {
    const std::uint32_t p = proposal_.load(std::memory_order_acquire);
    if (p == kNoProposal) return std::nullopt;
    return p;
  }

 private:
  friend struct testing::ArcPeer;

  struct alignas(64) Slot {
    std::atomic<std::uint32_t> r_start{0};
    std::atomic<std::uint32_t> r_end{0};
    std::size_t size = 0;
    ContentBuffer content;
  };

  struct alignas(64) WriterCounters {
    std::atomic<std::uint64_t> ops{0};
    std::atomic<std::uint64_t> rmw{0};
    std::atomic<std::uint64_t> max_scan_length{0};
    std::atomic<std::uint64_t> proposal_hits{0};
    std::atomic<std::uint64_t> no_free_slot{0};
    std::atomic<std::uint64_t> lemma_violations{0};
    std::atomic<std::uint64_t> counter_bound_violations{0};
  };

  static std::uint32_t validate_readers(std::uint64_t readers) {
    if (readers < 1 || readers > kMaxArcReaders) {
      throw CapacityError("ARC supports 1.." + std::to_string(kMaxArcReaders) +
                          " readers, got " + std::to_string(readers));
    }
    return static_cast<std::uint32_t>(readers);
  }

  void check_size(std::size_t size) const {
    if (size == 0 || size > max_size_) {
      throw ConfigError("payload size " + std::to_string(size) + " outside 1.." +
                        std::to_string(max_size_));
    }
  }

  bool is_free(std::uint32_t slot) const noexcept {
    const Slot& s = slots_[slot];
    return s.r_start.load(std::memory_order_acquire) == s.r_end.load(std::memory_order_acquire);
  }

  // Every slot other than last_slot has been retired, so its r_start is
  // frozen and only r_end can still move (upward). The sum is therefore an
  // upper bound on the readers still bound to retired slots.
  void audit_accounting(const Writer& writer) noexcept {
    std::uint64_t outstanding = 0;
    bool bad = false;
    for (std::uint32_t slot = 0; slot < slot_count_; ++slot) {
      if (slot == writer.last_slot_) continue;
      const std::uint32_t r_start = slots_[slot].r_start.load(std::memory_order_acquire);
      const std::uint32_t r_end = slots_[slot].r_end.load(std::memory_order_acquire);
      if (r_end > r_start) {
        bad = true;
        continue;
      }
      outstanding += r_start - r_end;
    }
    if (bad || outstanding > readers_) detail::bump(writer_.lemma_violations);
  }

  std::uint32_t readers_;
  std::uint32_t slot_count_ = 0;
  std::size_t max_size_;
  ArcOptions options_;
  BufferStats buffers_;
  std::unique_ptr<Slot[]> slots_;
  std::unique_ptr<detail::OwnerCounters[]> reader_counters_;
  std::atomic<std::uint64_t> readers_made_{0};
  std::atomic<bool> writer_made_{false};

  alignas(64) std::atomic<std::uint64_t> current_{0};
  alignas(64) std::atomic<std::uint32_t> proposal_{kNoProposal};
  WriterCounters writer_;
};

using ArcRegister = BasicArcRegister<WriteProtocol::kCopyThenPublish>;
/// Deliberately broken: publishes the slot before filling it.
using PublishBeforeCopyArcRegister = BasicArcRegister<WriteProtocol::kPublishThenCopy>;

extern template class BasicArcRegister<WriteProtocol::kCopyThenPublish>;
extern template class BasicArcRegister<WriteProtocol::kPublishThenCopy>;

static_assert(SwmrRegister<ArcRegister>);

}  // namespace arc
