#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "arc/payload.hpp"

namespace arc {

enum class OpKind : std::uint8_t { kRead, kWrite };

/// One register operation as observed from outside the call. Timestamps are
/// taken immediately before invoking and immediately after returning, so the
/// recorded interval contains the real one.
struct OpRecord {
  std::uint32_t thread = 0;
  OpKind kind = OpKind::kRead;
  bool intact = true;  // reads only
  std::int64_t invocation_ts = 0;
  std::int64_t response_ts = 0;
  std::uint64_t seq = 0;  // written (writes) or decoded (reads)

  friend bool operator==(const OpRecord&, const OpRecord&) = default;
};

/// Records from one run. Writes come from the single writer, so their seq
/// values order them; the register's initial value carries initial_seq.
struct History {
  std::vector<OpRecord> ops;
  std::uint32_t readers = 0;
  RegisterKind kind = RegisterKind::kArc;
  std::uint64_t initial_seq = 0;
};

inline std::int64_t monotonic_now_ns() noexcept {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

enum class ViolationKind : std::uint8_t {
  kNoPast,           // a write completed after pi(r) and before r started
  kFutureRead,       // r returned a value whose write started after r ended
  kNewOldInversion,  // r1 -> r2 but r2 returned an older value than r1
};

/// `read` and `other` index into History::ops. For kNoPast `other` is the
/// overwriting write, for kFutureRead the write r claims to have seen (or
/// SIZE_MAX for the initial value), for kNewOldInversion it is r1.
struct Violation {
  ViolationKind kind;
  std::size_t read;
  std::size_t other;
};

// Real-time order is strict: a -> b iff a.response_ts < b.invocation_ts.
// Writes are additionally ordered by seq (the writer's program order). Reads
// with intact == false carry no meaningful seq and are ignored by the two
// ordering checks; check_integrity counts them.

/// Regularity. An empty result means every intact read returned the value of
/// the last write that completed before it started or of a write overlapping
/// it. Throws CorruptedHistoryError if a read names a seq nobody wrote, or
/// if two writes share a seq.
std::vector<Violation> check_no_past(const History& history);

/// One violation per offending r2, paired with the r1 that returned the
/// largest seq among reads completed before r2 started. Empty together with
/// an empty check_no_past means the history is atomic. Same errors as above.
std::vector<Violation> check_no_new_old_inversion(const History& history);

/// Number of reads whose payload failed the versioned integrity scan.
std::size_t check_integrity(const History& history) noexcept;

struct VerificationReport {
  std::size_t no_past = 0;  // includes future reads
  std::size_t inversions = 0;
  std::size_t torn = 0;
  bool corrupted = false;

  std::size_t total() const noexcept {
    return no_past + inversions + torn + (corrupted ? 1 : 0);
  }
};

/// Runs all three checks. A corrupted history is reported, not thrown.
VerificationReport verify_history(const History& history);

/// Line format: `thread kind invocation_ts response_ts seq intact` with kind
/// `read` or `write` and intact 0/1. A leading `# readers=<n> kind=<KIND>`
/// comment carries the metadata; other `#` lines and blank lines are skipped.
void write_history(std::ostream& out, const History& history);
/// Throws ConfigError on malformed lines.
History read_history(std::istream& in);

}  // namespace arc
