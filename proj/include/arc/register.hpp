#pragma once

#include <atomic>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <utility>

#include "arc/content_buffer.hpp"
#include "arc/payload.hpp"

namespace arc {

/// Cumulative read-modify-write instruction counts since construction.
struct RmwCounters {
  std::uint64_t read_rmw = 0;
  std::uint64_t write_rmw = 0;
};

/// Everything a register's instrumentation can report. Fields that do not
/// apply to a register kind stay zero.
struct RegisterStats {
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  RmwCounters rmw;
  std::uint64_t max_read_rmw_per_op = 0;
  // ARC writer-side bookkeeping.
  std::uint64_t max_scan_length = 0;
  std::uint64_t proposal_hits = 0;
  std::uint64_t no_free_slot = 0;
  std::uint64_t lemma_violations = 0;
  std::uint64_t counter_bound_violations = 0;
};

namespace detail {

// Single-owner counter bump: only the owning thread stores, others may load.
inline void bump(std::atomic<std::uint64_t>& c, std::uint64_t by = 1) noexcept {
  c.store(c.load(std::memory_order_relaxed) + by, std::memory_order_relaxed);
}

inline void raise_to(std::atomic<std::uint64_t>& c, std::uint64_t v) noexcept {
  if (v > c.load(std::memory_order_relaxed)) c.store(v, std::memory_order_relaxed);
}

struct alignas(64) OwnerCounters {
  std::atomic<std::uint64_t> ops{0};
  std::atomic<std::uint64_t> rmw{0};
  std::atomic<std::uint64_t> max_rmw_per_op{0};
};

// Relaxed word-wise copies for buffers that are read while possibly being
// written (seqlock-style protocols). Both buffers hold whole 64-bit words.
inline void racy_store_words(std::byte* dst, const std::byte* src, std::size_t bytes) noexcept {
  const std::size_t words = (bytes + 7) / 8;
  auto* d = reinterpret_cast<std::uint64_t*>(dst);
  for (std::size_t i = 0; i < words; ++i) {
    std::uint64_t w = 0;
    std::memcpy(&w, src + 8 * i, (i + 1 == words && bytes % 8) ? bytes % 8 : 8);
    std::atomic_ref<std::uint64_t>(d[i]).store(w, std::memory_order_relaxed);
  }
}

inline void racy_load_words(std::byte* dst, const std::byte* src, std::size_t bytes) noexcept {
  const std::size_t words = (bytes + 7) / 8;
  auto* s = const_cast<std::uint64_t*>(reinterpret_cast<const std::uint64_t*>(src));
  auto* d = reinterpret_cast<std::uint64_t*>(dst);
  for (std::size_t i = 0; i < words; ++i) {
    d[i] = std::atomic_ref<std::uint64_t>(s[i]).load(std::memory_order_relaxed);
  }
}

}  // namespace detail

/// Single-writer / multi-reader register contract shared by ARC and the
/// baselines.
///
/// `read` returns a view that stays valid and unchanged until the next read
/// on the same reader handle. `visit` calls `fn` with the current snapshot
/// while it is guaranteed stable; for most registers that is just
/// `fn(read(reader))`, the lock-based register keeps its lock held instead of
/// copying.
template <class R>
concept SwmrRegister = requires(R& reg, const R& creg, typename R::Reader& reader,
                                typename R::Writer& writer, Payload value) {
  { R::kKind } -> std::convertible_to<RegisterKind>;
  { reg.make_reader() } -> std::same_as<typename R::Reader>;
  { reg.make_writer() } -> std::same_as<typename R::Writer>;
  { reg.read(reader) } -> std::same_as<std::span<const std::byte>>;
  reg.write(writer, value);
  { creg.rmw_counters() } -> std::same_as<RmwCounters>;
  { creg.stats() } -> std::same_as<RegisterStats>;
  { creg.buffer_stats() } -> std::same_as<BufferStats>;
  { creg.max_size() } -> std::same_as<std::size_t>;
  { creg.reader_capacity() } -> std::convertible_to<std::size_t>;
};

template <SwmrRegister R, class Fn>
decltype(auto) visit_read(R& reg, typename R::Reader& reader, Fn&& fn) {
  if constexpr (requires { reg.visit(reader, std::forward<Fn>(fn)); }) {
    return reg.visit(reader, std::forward<Fn>(fn));
  } else {
    return std::forward<Fn>(fn)(reg.read(reader));
  }
}

}  // namespace arc
