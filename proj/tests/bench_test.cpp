#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "arc/bench.hpp"
#include "arc/errors.hpp"

namespace arc {
namespace {

BenchConfig quick(RegisterKind algo, std::uint32_t readers, std::size_t size = 4096) {
  BenchConfig cfg;
  cfg.algo = algo;
  cfg.readers = readers;
  cfg.size = size;
  cfg.duration_s = 0.05;
  cfg.min_ops = 20'000;
  return cfg;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(ParseSize, UnitsArePowersOf1024) {
  EXPECT_EQ(parse_size("4096"), 4096u);
  EXPECT_EQ(parse_size("4KB"), 4096u);
  EXPECT_EQ(parse_size("32k"), 32768u);
  EXPECT_EQ(parse_size("128KB"), 131072u);
  EXPECT_EQ(parse_size("1M"), 1048576u);
  EXPECT_THROW(parse_size("KB"), ConfigError);
  EXPECT_THROW(parse_size("4GB"), ConfigError);
}

TEST(Validate, RejectsBadConfigs) {
  BenchConfig cfg = quick(RegisterKind::kRf, 59);
  EXPECT_THROW(validate(cfg), CapacityError);
  cfg = quick(RegisterKind::kArc, 0);
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = quick(RegisterKind::kArc, 1, 4);
  EXPECT_THROW(validate(cfg), ConfigError);
  cfg = quick(RegisterKind::kArc, 1);
  cfg.history_path = "x";
  EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(RunBench, ArcSmoke) {
  BenchConfig cfg = quick(RegisterKind::kArc, 1);
  cfg.verify = true;
  const BenchResult r = run_bench(cfg);
  EXPECT_GE(r.writes, 1);
  EXPECT_GE(r.reads, 1);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_GT(r.throughput_ops_s, 0);
  EXPECT_NEAR(r.throughput_ops_s, (r.reads + r.writes) / r.duration_s,
              1e-6 * r.throughput_ops_s);
}

TEST(RunBench, ArcBeyondRfCapacity) {
  BenchConfig cfg = quick(RegisterKind::kArc, 128);
  const BenchResult r = run_bench(cfg);
  EXPECT_EQ(r.readers, 128u);
  EXPECT_GT(r.reads, 0);
  EXPECT_EQ(r.buffers.count, 130u);
}

TEST(RunBench, WorkModeScansWithoutTearing) {
  for (RegisterKind k : {RegisterKind::kArc, RegisterKind::kRf, RegisterKind::kPeterson,
                         RegisterKind::kRwlock}) {
    BenchConfig cfg = quick(k, 3, 1024);
    cfg.mode = BenchMode::kWork;
    const BenchResult r = run_bench(cfg);
    EXPECT_EQ(r.torn_unrecorded, 0u) << to_string(k);
    EXPECT_EQ(r.violations, 0u) << to_string(k);
  }
}

// With no writer, ARC readers never leave slot 0, so no read executes an
// RMW; RF pays one per read regardless.
TEST(RunBench, WriterDisabledRmwEconomy) {
  BenchConfig cfg = quick(RegisterKind::kArc, 2);
  cfg.writer_enabled = false;
  const BenchResult arc = run_bench(cfg);
  EXPECT_GT(arc.reads, 0);
  EXPECT_EQ(arc.read_rmw, 0);
  EXPECT_EQ(arc.writes, 0);

  cfg.algo = RegisterKind::kRf;
  const BenchResult rf = run_bench(cfg);
  EXPECT_GT(rf.reads, 0);
  EXPECT_GE(rf.read_rmw, rf.reads);
}

TEST(RunBench, RepeatAveragesRuns) {
  BenchConfig cfg = quick(RegisterKind::kArc, 1);
  cfg.repeat = 3;
  const BenchResult r = run_bench(cfg);
  EXPECT_EQ(r.repetitions, 3u);
  EXPECT_GT(r.reads, 0);
}

TEST(RunBench, HistoryDumpIsRecheckable) {
  BenchConfig cfg = quick(RegisterKind::kArc, 2, 256);
  cfg.verify = true;
  cfg.history_path = ::testing::TempDir() + "arc_history.txt";
  const BenchResult r = run_bench(cfg);
  std::ifstream in(*cfg.history_path);
  const History h = read_history(in);
  EXPECT_EQ(h.readers, 2u);
  EXPECT_GE(h.ops.size(), 20'000u);
  EXPECT_EQ(verify_history(h).total(), 0u);
  EXPECT_EQ(r.violations, 0u);
  std::remove(cfg.history_path->c_str());
}

TEST(Csv, OneResultIsHeaderPlusRow) {
  BenchResult r;
  r.algo = RegisterKind::kRf;
  r.mode = BenchMode::kWork;
  r.readers = 16;
  r.size = 131072;
  r.duration_s = 1.5;
  r.reads = 1000;
  r.writes = 10;
  r.read_rmw = 1000;
  r.write_rmw = 10;
  r.throughput_ops_s = 673.333333;
  r.violations = 0;
  std::ostringstream out;
  const std::vector<BenchResult> rows{r};
  emit_csv(out, rows);
  const auto lines = lines_of(out.str());
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0],
            "algo,mode,readers,size_bytes,duration_s,reads,writes,read_rmw,write_rmw,"
            "throughput_ops_s,violations");
  EXPECT_EQ(lines[1], "RF,work,16,131072,1.500000,1000,10,1000,10,673.33,0");
}

TEST(Csv, UnwritablePathThrows) {
  const std::vector<BenchResult> rows(1);
  EXPECT_THROW(emit_csv(std::string("/nonexistent-dir/out.csv"), rows), std::runtime_error);
}

TEST(Matrix, ParseAndCountRows) {
  const MatrixSpec spec = parse_matrix(R"({
    "algos": ["ARC", "RF", "PETERSON", "RWLOCK"],
    "readers": [2],
    "sizes": ["4KB", "32KB", 131072],
    "mode": "hold", "duration": 0.01, "repeat": 1, "min_ops": 1000
  })");
  EXPECT_EQ(spec.algos.size(), 4u);
  EXPECT_EQ(spec.sizes, (std::vector<std::size_t>{4096, 32768, 131072}));
  EXPECT_EQ(spec.base.min_ops, 1000u);
  EXPECT_EQ(matrix_row_count(spec), 12u);

  std::ostringstream notes;
  const auto results = run_matrix(spec, notes);
  ASSERT_EQ(results.size(), 12u);
  std::ostringstream csv;
  emit_csv(csv, results);
  EXPECT_EQ(lines_of(csv.str()).size(), 13u);
  EXPECT_TRUE(notes.str().empty());
}

TEST(Matrix, PresetReaderLists) {
  const MatrixSpec physical = parse_matrix(
      R"({"algos": ["ARC","RF"], "readers": [1,2,4,8,16,31], "sizes": ["4KB"]})");
  EXPECT_EQ(matrix_row_count(physical), 12u);
  const MatrixSpec oversubscribed = parse_matrix(
      R"({"algos": ["ARC","RF","PETERSON","RWLOCK"], "readers": [64,512,4000], "sizes": ["4KB"]})");
  EXPECT_EQ(matrix_row_count(oversubscribed), 9u);  // RF hosts none of them
}

TEST(Matrix, RfSkippedAboveCapacityWithNote) {
  MatrixSpec spec = parse_matrix(R"({"algos": ["RF"], "readers": [1, 59], "sizes": [64],
                                    "duration": 0.01, "min_ops": 1000, "repeat": 1})");
  std::ostringstream notes;
  const auto results = run_matrix(spec, notes);
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0].readers, 1u);
  EXPECT_NE(notes.str().find("skipped RF readers=59"), std::string::npos);
}

TEST(Matrix, MalformedJsonIsAConfigError) {
  EXPECT_THROW(parse_matrix("{"), ConfigError);
  EXPECT_THROW(parse_matrix(R"({"algos": ["ARC"], "readers": [], "sizes": [64]})"), ConfigError);
  EXPECT_THROW(parse_matrix(R"({"algos": ["XYZ"], "readers": [1], "sizes": [64]})"), ConfigError);
  EXPECT_THROW(parse_matrix(R"({"readers": [1], "sizes": [64]})"), ConfigError);
}

// Single reader, no writer: the run is bounded by the operation floor, so two
// runs with the same seed complete nearly the same number of operations. The
// floor is large enough that the 1 ms stop-poll overshoot stays well under 5%.
TEST(Determinism, SingleThreadHoldRunsAgreeWithinFivePercent) {
  BenchConfig cfg = quick(RegisterKind::kArc, 1);
  cfg.writer_enabled = false;
  cfg.duration_s = 0;
  cfg.min_ops = 40'000'000;
  cfg.seed = 42;
  const BenchResult a = run_bench(cfg);
  const BenchResult b = run_bench(cfg);
  EXPECT_EQ(a.writes, b.writes);
  EXPECT_NEAR(a.reads, b.reads, 0.05 * a.reads);
}

}  // namespace
}  // namespace arc
