#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arc/content_buffer.hpp"
#include "arc/payload.hpp"
#include "arc/register.hpp"
#include "arc/verify.hpp"

namespace arc {

/// hold: writes copy one fixed buffer, reads only fetch the snapshot view.
/// work: writes encode a fresh versioned payload, reads scan the whole value.
enum class BenchMode { kHold, kWork };

std::string_view to_string(BenchMode mode);
BenchMode parse_bench_mode(std::string_view name);

/// Accepts plain byte counts and K/KB/M/MB suffixes (powers of 1024).
std::size_t parse_size(std::string_view text);

struct BenchConfig {
  RegisterKind algo = RegisterKind::kArc;
  std::uint32_t readers = 1;
  std::size_t size = 4096;
  double duration_s = 1.0;
  BenchMode mode = BenchMode::kHold;
  /// Record every operation and check the history afterwards. Forces
  /// versioned payloads and full read scans regardless of mode.
  bool verify = false;
  std::uint64_t seed = 0;
  std::optional<std::string> csv_path;
  bool pin = false;
  unsigned repeat = 1;
  /// A run lasts at least duration_s and at least this many operations.
  std::uint64_t min_ops = 2'000'000;
  /// Verify runs stop once this many operations are recorded (0: 3 * min_ops).
  std::uint64_t max_recorded_ops = 0;
  /// Debug switch: no writer thread at all.
  bool writer_enabled = true;
  /// ARC only: per-write slot accounting audit.
  bool audit = false;
  /// Verify runs only: dump the merged history of the last repetition here.
  std::optional<std::string> history_path;
};

/// Throws ConfigError / CapacityError for invalid configurations.
void validate(const BenchConfig& cfg);

struct BenchResult {
  RegisterKind algo = RegisterKind::kArc;
  BenchMode mode = BenchMode::kHold;
  std::uint32_t readers = 0;
  std::size_t size = 0;
  unsigned repetitions = 0;
  // Averages over repetitions.
  double duration_s = 0;
  double reads = 0;
  double writes = 0;
  double read_rmw = 0;
  double write_rmw = 0;
  double throughput_ops_s = 0;
  double read_throughput_ops_s = 0;
  double write_throughput_ops_s = 0;
  // Summed over repetitions.
  std::uint64_t violations = 0;
  VerificationReport verification;
  std::uint64_t torn_unrecorded = 0;  // work-mode torn reads when not verifying
  // Maxima / sums of the registers' own instrumentation across repetitions.
  RegisterStats stats;
  BufferStats buffers;
};

/// Runs cfg.repeat repetitions of the workload and averages them.
BenchResult run_bench(const BenchConfig& cfg);

inline constexpr std::string_view kCsvHeader =
    "algo,mode,readers,size_bytes,duration_s,reads,writes,read_rmw,write_rmw,"
    "throughput_ops_s,violations";

void emit_csv(std::ostream& out, std::span<const BenchResult> results);
/// Throws std::runtime_error if the file cannot be written.
void emit_csv(const std::string& path, std::span<const BenchResult> results);

struct MatrixSpec {
  std::vector<RegisterKind> algos;
  std::vector<std::uint32_t> readers;
  std::vector<std::size_t> sizes;
  BenchConfig base;  // mode, duration, repeat, verify, ...
};

/// JSON sweep description, e.g.
/// {"algos": ["ARC","RF"], "readers": [1,2,4], "sizes": ["4KB", 32768],
///  "mode": "hold", "duration": 1.0, "repeat": 10, "verify": false}
MatrixSpec parse_matrix(std::string_view json_text);
MatrixSpec load_matrix(const std::string& path);

/// Cartesian sweep in algo, size, readers order. Combinations RF cannot host
/// (more than 58 readers) are skipped with a note written to `notes`.
std::vector<BenchResult> run_matrix(const MatrixSpec& spec, std::ostream& notes);

/// Number of result rows run_matrix would produce.
std::size_t matrix_row_count(const MatrixSpec& spec);

}  // namespace arc
