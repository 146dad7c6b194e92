#pragma once

// The generic workload engine behind run_bench. Exposed so tests can drive
// registers that are not selectable by RegisterKind (the broken ARC variant).

#include <atomic>
#include <chrono>
#include <cstdint>
#include <latch>
#include <memory>
#include <random>
#include <thread>
#include <vector>

#include "arc/bench.hpp"
#include "arc/payload.hpp"
#include "arc/register.hpp"
#include "arc/verify.hpp"

namespace arc {

struct RunOutcome {
  double elapsed_s = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  RegisterStats stats;
  BufferStats buffers;
  VerificationReport verification;
  std::uint64_t torn_unrecorded = 0;
  History history;  // verify runs only
};

namespace detail {

template <class T>
inline void do_not_optimize(const T& value) {
  asm volatile("" : : "r,m"(value) : "memory");
}

/// Best effort; ignored where affinity is unsupported.
void pin_current_thread(unsigned index) noexcept;

struct alignas(64) ThreadState {
  std::atomic<std::uint64_t> ops{0};
  std::uint64_t torn = 0;
  std::vector<OpRecord> records;
};

}  // namespace detail

/// One timed run of one writer plus cfg.readers readers against `reg`. The
/// register must have been built with cfg.readers readers, max_size >=
/// cfg.size, and initial value encode_versioned(0, cfg.size).
template <SwmrRegister R>
RunOutcome drive_register(R& reg, const BenchConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const bool versioned = cfg.verify || cfg.mode == BenchMode::kWork;
  const std::uint64_t record_cap =
      cfg.max_recorded_ops != 0 ? cfg.max_recorded_ops : 3 * cfg.min_ops;
  const unsigned threads = cfg.readers + (cfg.writer_enabled ? 1 : 0);

  auto state = std::make_unique<detail::ThreadState[]>(cfg.readers + 1);
  std::atomic<bool> stop{false};
  std::latch start(1);
  std::vector<std::thread> pool;
  pool.reserve(threads);

  if (cfg.writer_enabled) {
    pool.emplace_back([&, writer = reg.make_writer()]() mutable {
      if (cfg.pin) detail::pin_current_thread(0);
      detail::ThreadState& me = state[0];
      std::vector<std::byte> staging(cfg.size);
      std::mt19937_64 rng(cfg.seed);
      for (auto& b : staging) b = static_cast<std::byte>(rng());
      if (cfg.verify) me.records.reserve(1024);
      start.wait();

      std::uint64_t seq = 0;
      while (!stop.load(std::memory_order_relaxed)) {
        ++seq;
        if (versioned) encode_versioned_into(seq, staging);
        if (cfg.verify) {
          const std::int64_t t0 = monotonic_now_ns();
          reg.write(writer, staging);
          const std::int64_t t1 = monotonic_now_ns();
          me.records.push_back({0, OpKind::kWrite, true, t0, t1, seq});
        } else {
          reg.write(writer, staging);
        }
        me.ops.store(seq, std::memory_order_relaxed);
      }
    });
  }

  for (std::uint32_t i = 0; i < cfg.readers; ++i) {
    pool.emplace_back([&, i, reader = reg.make_reader()]() mutable {
      const std::uint32_t id = i + 1;
      if (cfg.pin) detail::pin_current_thread(id);
      detail::ThreadState& me = state[id];
      if (cfg.verify) me.records.reserve(static_cast<std::size_t>(record_cap / threads + 1));
      start.wait();

      std::uint64_t done = 0;
      while (!stop.load(std::memory_order_relaxed)) {
        if (cfg.verify) {
          const std::int64_t t0 = monotonic_now_ns();
          const Decoded d =
              visit_read(reg, reader, [](std::span<const std::byte> v) { return decode_versioned(v); });
          const std::int64_t t1 = monotonic_now_ns();
          me.records.push_back({id, OpKind::kRead, d.intact, t0, t1, d.seq});
        } else if (versioned) {
          const Decoded d =
              visit_read(reg, reader, [](std::span<const std::byte> v) { return decode_versioned(v); });
          if (!d.intact) ++me.torn;
        } else {
          visit_read(reg, reader, [](std::span<const std::byte> v) {
            detail::do_not_optimize(v.data());
            detail::do_not_optimize(v.size());
          });
        }
        if ((++done & 63) == 0) me.ops.store(done, std::memory_order_relaxed);
      }
      me.ops.store(done, std::memory_order_relaxed);
    });
  }

  const auto duration = std::chrono::duration<double>(cfg.duration_s);
  const Clock::time_point began = Clock::now();
  start.count_down();
  for (;;) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
    std::uint64_t total = 0;
    for (unsigned t = 0; t <= cfg.readers; ++t) total += state[t].ops.load(std::memory_order_relaxed);
    const bool long_enough = Clock::now() - began >= duration && total >= cfg.min_ops;
    if (long_enough || (cfg.verify && total >= record_cap)) break;
  }
  stop.store(true, std::memory_order_relaxed);
  const Clock::time_point ended = Clock::now();
  for (auto& t : pool) t.join();

  RunOutcome out;
  out.elapsed_s = std::chrono::duration<double>(ended - began).count();
  out.stats = reg.stats();
  out.buffers = reg.buffer_stats();
  out.writes = state[0].ops.load(std::memory_order_relaxed);
  for (std::uint32_t i = 1; i <= cfg.readers; ++i) {
    out.reads += state[i].ops.load(std::memory_order_relaxed);
    out.torn_unrecorded += state[i].torn;
  }
  if (cfg.verify) {
    out.history.readers = cfg.readers;
    out.history.kind = R::kKind;
    std::size_t total = 0;
    for (unsigned t = 0; t <= cfg.readers; ++t) total += state[t].records.size();
    out.history.ops.reserve(total);
    for (unsigned t = 0; t <= cfg.readers; ++t) {
      auto& recs = state[t].records;
      out.history.ops.insert(out.history.ops.end(), recs.begin(), recs.end());
      std::vector<OpRecord>().swap(recs);
    }
    out.verification = verify_history(out.history);
  }
  return out;
}

}  // namespace arc
