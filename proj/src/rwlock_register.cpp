#include "arc/rwlock_register.hpp"

#include <algorithm>
#include <string>
#include <thread>

#include "arc/errors.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

namespace arc {
namespace {

// Spin briefly, then give the CPU away; oversubscribed runs depend on it.
class Backoff {
 public:
  void pause() noexcept {
    if (spins_ < 64) {
      ++spins_;
#if defined(__x86_64__) || defined(__i386__)
      _mm_pause();
#endif
    } else {
      std::this_thread::yield();
    }
  }

 private:
  int spins_ = 0;
};

}  // namespace

std::uint64_t RwSpinLock::lock_shared() noexcept {
  std::uint64_t rmw = 0;
  Backoff backoff;
  for (;;) {
    while (state_.load(std::memory_order_relaxed) & kWriterBit) backoff.pause();
    ++rmw;
    const std::uint32_t prev = state_.fetch_add(1, std::memory_order_acquire);
    if ((prev & kWriterBit) == 0) return rmw;
    ++rmw;
    state_.fetch_sub(1, std::memory_order_relaxed);
  }
}

std::uint64_t RwSpinLock::unlock_shared() noexcept {
  state_.fetch_sub(1, std::memory_order_release);
  return 1;
}

std::uint64_t RwSpinLock::lock() noexcept {
  state_.fetch_or(kWriterBit, std::memory_order_acquire);
  Backoff backoff;
  while ((state_.load(std::memory_order_acquire) & ~kWriterBit) != 0) backoff.pause();
  return 1;
}

std::uint64_t RwSpinLock::unlock() noexcept {
  state_.fetch_and(~kWriterBit, std::memory_order_release);
  return 1;
}

RwlockRegister::RwlockRegister(Payload initial, std::uint32_t readers, std::size_t max_size)
    : readers_(readers), max_size_(max_size) {
  if (readers < 1) throw CapacityError("at least one reader is required");
  if (max_size == 0) throw ConfigError("max_size must be positive");
  if (initial.empty() || initial.size() > max_size) {
    throw ConfigError("initial payload size " + std::to_string(initial.size()) +
                      " outside 1.." + std::to_string(max_size));
  }
  content_ = ContentBuffer(max_size, buffers_stats_);
  std::memcpy(content_.data(), initial.data(), initial.size());
  size_ = initial.size();
  reader_counters_ = std::make_unique<detail::OwnerCounters[]>(readers);
}

RwlockRegister::Reader RwlockRegister::make_reader() {
  const std::uint32_t id = readers_made_.fetch_add(1, std::memory_order_relaxed);
  if (id >= readers_) {
    readers_made_.fetch_sub(1, std::memory_order_relaxed);
    throw CapacityError("register was built for " + std::to_string(readers_) + " readers");
  }
  return Reader(id, &reader_counters_[id]);
}

RwlockRegister::Writer RwlockRegister::make_writer() {
  if (writer_made_.exchange(true)) throw CapacityError("register already has its writer");
  return Writer();
}

std::span<const std::byte> RwlockRegister::read(Reader& reader) {
  if (reader.scratch_.capacity() == 0) reader.scratch_ = ContentBuffer(max_size_, reader.scratch_stats_);
  visit(reader, [&](std::span<const std::byte> value) {
    std::memcpy(reader.scratch_.data(), value.data(), value.size());
    reader.scratch_size_ = value.size();
  });
  return reader.scratch_.view(reader.scratch_size_);
}

void RwlockRegister::write(Writer&, Payload value) {
  if (value.empty() || value.size() > max_size_) {
    throw ConfigError("payload size " + std::to_string(value.size()) + " outside 1.." +
                      std::to_string(max_size_));
  }
  std::uint64_t rmw = lock_.lock();
  std::memcpy(content_.data(), value.data(), value.size());
  size_ = value.size();
  rmw += lock_.unlock();
  detail::bump(writer_counters_.ops);
  detail::bump(writer_counters_.rmw, rmw);
}

RmwCounters RwlockRegister::rmw_counters() const noexcept {
  RmwCounters out;
  for (std::uint32_t i = 0; i < readers_; ++i) {
    out.read_rmw += reader_counters_[i].rmw.load(std::memory_order_relaxed);
  }
  out.write_rmw = writer_counters_.rmw.load(std::memory_order_relaxed);
  return out;
}

RegisterStats RwlockRegister::stats() const noexcept {
  RegisterStats out;
  for (std::uint32_t i = 0; i < readers_; ++i) {
    const auto& c = reader_counters_[i];
    out.reads += c.ops.load(std::memory_order_relaxed);
    out.rmw.read_rmw += c.rmw.load(std::memory_order_relaxed);
    out.max_read_rmw_per_op =
        std::max(out.max_read_rmw_per_op, c.max_rmw_per_op.load(std::memory_order_relaxed));
  }
  out.writes = writer_counters_.ops.load(std::memory_order_relaxed);
  out.rmw.write_rmw = writer_counters_.rmw.load(std::memory_order_relaxed);
  return out;
}

}  // namespace arc
