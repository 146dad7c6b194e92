#include <gtest/gtest.h>

#include <vector>

#include "arc/bench.hpp"
#include "arc/errors.hpp"
#include "arc/peterson_register.hpp"
#include "arc/rf_register.hpp"
#include "arc/rwlock_register.hpp"

namespace arc {
namespace {

std::vector<std::byte> value(std::uint64_t seq, std::size_t size = 64) {
  return encode_versioned(seq, size);
}

std::uint64_t seq_of(std::span<const std::byte> view) {
  const Decoded d = decode_versioned(view);
  EXPECT_TRUE(d.intact);
  return d.seq;
}

TEST(Rf, CapacityIsFiftyEightReaders) {
  const auto v0 = value(0);
  EXPECT_NO_THROW(RfRegister(v0, 58, 64));
  EXPECT_THROW(RfRegister(v0, 59, 64), CapacityError);
  EXPECT_THROW(RfRegister(v0, 0, 64), CapacityError);
}

TEST(Rf, UsesNPlusTwoBuffers) {
  const auto v0 = value(0);
  RfRegister reg(v0, 13, 64);
  EXPECT_EQ(reg.buffer_stats().count, 15u);
  EXPECT_EQ(reg.buffer_count(), 15u);
}

TEST(Rf, EveryReadExecutesAnRmw) {
  const auto v0 = value(0);
  RfRegister reg(v0, 2, 64);
  auto r = reg.make_reader();
  for (int i = 0; i < 100; ++i) EXPECT_EQ(seq_of(reg.read(r)), 0u);
  EXPECT_EQ(reg.rmw_counters().read_rmw, 100u);
  EXPECT_EQ(reg.stats().reads, 100u);
}

TEST(Rf, SequentialWriteThenRead) {
  const auto v0 = value(0);
  RfRegister reg(v0, 3, 64);
  auto w = reg.make_writer();
  auto r = reg.make_reader();
  std::uint64_t last = 0;
  for (std::uint64_t k = 1; k <= 1000; ++k) {
    reg.write(w, value(k, 8 + k % 57));
    const std::uint64_t seen = seq_of(reg.read(r));
    ASSERT_EQ(seen, k);
    ASSERT_GT(seen, last);
    last = seen;
  }
  EXPECT_EQ(reg.rmw_counters().write_rmw, 1000u);
}

// Park each of the 58 readers on a different buffer, then keep writing: the
// writer must always find one of the 60 buffers unclaimed and readers keep
// their parked snapshots intact.
TEST(Rf, AllReadersParkedOnDistinctBuffers) {
  const auto v0 = value(0);
  RfRegister reg(v0, 58, 64);
  auto w = reg.make_writer();
  std::vector<RfRegister::Reader> readers;
  std::vector<std::span<const std::byte>> parked;
  for (std::uint32_t i = 0; i < 58; ++i) {
    readers.push_back(reg.make_reader());
    reg.write(w, value(i + 1));
    parked.push_back(reg.read(readers.back()));
  }
  for (std::uint64_t k = 100; k < 400; ++k) reg.write(w, value(k));
  for (std::uint32_t i = 0; i < 58; ++i) EXPECT_EQ(seq_of(parked[i]), i + 1);
  EXPECT_EQ(seq_of(reg.read(readers[0])), 399u);
}

TEST(Peterson, SequentialWriteThenRead) {
  const auto v0 = value(0);
  PetersonRegister reg(v0, 2, 64);
  auto w = reg.make_writer();
  auto a = reg.make_reader();
  auto b = reg.make_reader();
  EXPECT_EQ(seq_of(reg.read(a)), 0u);
  for (std::uint64_t k = 1; k <= 200; ++k) {
    reg.write(w, value(k, 8 + k % 50));
    ASSERT_EQ(seq_of(reg.read(a)), k);
    if (k % 3 == 0) ASSERT_EQ(seq_of(reg.read(b)), k);
  }
  EXPECT_EQ(reg.rmw_counters().read_rmw, 0u);
  EXPECT_EQ(reg.rmw_counters().write_rmw, 0u);
  EXPECT_EQ(reg.buffer_stats().count, 2u + 2u);
}

TEST(Peterson, ReadStartedBeforeWriteIsServedACopy) {
  const auto v0 = value(0);
  PetersonRegister reg(v0, 1, 64);
  auto w = reg.make_writer();
  auto r = reg.make_reader();
  reg.read(r);              // READING != WRITING from now on
  reg.write(w, value(1));   // writer hands this reader a copy
  EXPECT_EQ(seq_of(reg.read(r)), 1u);
}

TEST(Rwlock, SequentialWriteThenRead) {
  const auto v0 = value(0);
  RwlockRegister reg(v0, 2, 64);
  auto w = reg.make_writer();
  auto r = reg.make_reader();
  for (std::uint64_t k = 1; k <= 100; ++k) {
    reg.write(w, value(k));
    ASSERT_EQ(seq_of(reg.read(r)), k);
    ASSERT_EQ(visit_read(reg, r, [](std::span<const std::byte> v) { return decode_versioned(v).seq; }), k);
  }
  EXPECT_EQ(reg.buffer_stats().count, 1u);
  EXPECT_EQ(reg.rmw_counters().read_rmw, 400u);  // lock + unlock, uncontended
  EXPECT_EQ(reg.rmw_counters().write_rmw, 200u);
}

TEST(Baselines, RejectOversizedWrites) {
  const auto v0 = value(0);
  RfRegister rf(v0, 1, 64);
  PetersonRegister pe(v0, 1, 64);
  RwlockRegister rw(v0, 1, 64);
  auto w1 = rf.make_writer();
  auto w2 = pe.make_writer();
  auto w3 = rw.make_writer();
  const auto big = value(1, 128);
  EXPECT_THROW(rf.write(w1, big), ConfigError);
  EXPECT_THROW(pe.write(w2, big), ConfigError);
  EXPECT_THROW(rw.write(w3, big), ConfigError);
}

class BaselineStress : public ::testing::TestWithParam<RegisterKind> {};

TEST_P(BaselineStress, EightReadersProduceAnAtomicHistory) {
  BenchConfig cfg;
  cfg.algo = GetParam();
  cfg.readers = 8;
  cfg.size = 4096;
  cfg.duration_s = 0;
  cfg.min_ops = 300'000;
  cfg.verify = true;
  const BenchResult result = run_bench(cfg);
  EXPECT_GT(result.writes, 0);
  EXPECT_FALSE(result.verification.corrupted);
  EXPECT_EQ(result.verification.no_past, 0u);
  EXPECT_EQ(result.verification.inversions, 0u);
  EXPECT_EQ(result.verification.torn, 0u);
  EXPECT_EQ(result.violations, 0u);
}

INSTANTIATE_TEST_SUITE_P(All, BaselineStress,
                         ::testing::Values(RegisterKind::kRf, RegisterKind::kPeterson,
                                           RegisterKind::kRwlock),
                         [](const auto& info) { return std::string(to_string(info.param)); });

}  // namespace
}  // namespace arc
