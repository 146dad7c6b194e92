#include "arc/rf_register.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#include "arc/errors.hpp"

namespace arc {

RfRegister::RfRegister(Payload initial, std::uint32_t readers, std::size_t max_size)
    : readers_(readers), max_size_(max_size) {
  if (readers < 1 || readers > kMaxReaders) {
    throw CapacityError("RF admits at most 58 readers, got " + std::to_string(readers));
  }
  if (max_size == 0) throw ConfigError("max_size must be positive");
  if (initial.empty() || initial.size() > max_size) {
    throw ConfigError("initial payload size " + std::to_string(initial.size()) +
                      " outside 1.." + std::to_string(max_size));
  }
  const std::uint32_t count = readers + 2;
  buffers_.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) buffers_.emplace_back(max_size, buffers_stats_);
  sizes_.assign(count, 0);
  std::memcpy(buffers_[0].data(), initial.data(), initial.size());
  sizes_[0] = initial.size();
  reader_fields_.fill(kNoTrace);
  reader_counters_ = std::make_unique<detail::OwnerCounters[]>(readers);
  status_.store(0, std::memory_order_release);
}

RfRegister::Reader RfRegister::make_reader() {
  const std::uint32_t id = readers_made_.fetch_add(1, std::memory_order_relaxed);
  if (id >= readers_) {
    readers_made_.fetch_sub(1, std::memory_order_relaxed);
    throw CapacityError("register was built for " + std::to_string(readers_) + " readers");
  }
  return Reader(id, &reader_counters_[id]);
}

RfRegister::Writer RfRegister::make_writer() {
  if (writer_made_.exchange(true)) throw CapacityError("register already has its writer");
  return Writer();
}

std::span<const std::byte> RfRegister::read(Reader& reader) noexcept {
  const std::uint64_t bit = std::uint64_t{1} << reader.id_;
  const std::uint64_t word = status_.fetch_or(bit, std::memory_order_acq_rel);
  const auto index = static_cast<std::uint32_t>(word >> kIndexShift);

  detail::OwnerCounters& c = *reader.counters_;
  detail::bump(c.ops);
  detail::bump(c.rmw);
  detail::raise_to(c.max_rmw_per_op, 1);
  return buffers_[index].view(sizes_[index]);
}

std::uint32_t RfRegister::pick_free_buffer() const noexcept {
  std::uint64_t busy = std::uint64_t{1} << current_index_;
  for (std::uint32_t i = 0; i < readers_; ++i) {
    if (reader_fields_[i] != kNoTrace) busy |= std::uint64_t{1} << reader_fields_[i];
  }
  const std::uint64_t free_set = ~busy & ((std::uint64_t{1} << buffers_.size()) - 1);
  if (free_set == 0) {
    std::fprintf(stderr, "rf: no free buffer among %zu\n", buffers_.size());
    std::abort();
  }
  return static_cast<std::uint32_t>(std::countr_zero(free_set));
}

void RfRegister::write(Writer&, Payload value) {
  if (value.empty() || value.size() > max_size_) {
    throw ConfigError("payload size " + std::to_string(value.size()) + " outside 1.." +
                      std::to_string(max_size_));
  }
  const std::uint32_t target = pick_free_buffer();
  std::memcpy(buffers_[target].data(), value.data(), value.size());
  sizes_[target] = value.size();

  const std::uint64_t old =
      status_.exchange(std::uint64_t{target} << kIndexShift, std::memory_order_acq_rel);
  const auto old_index = static_cast<std::uint8_t>(old >> kIndexShift);
  for (std::uint64_t mask = old & kMaskBits; mask != 0; mask &= mask - 1) {
    reader_fields_[std::countr_zero(mask)] = old_index;
  }
  current_index_ = target;

  detail::bump(writer_counters_.ops);
  detail::bump(writer_counters_.rmw);
}

RmwCounters RfRegister::rmw_counters() const noexcept {
  RmwCounters out;
  for (std::uint32_t i = 0; i < readers_; ++i) {
    out.read_rmw += reader_counters_[i].rmw.load(std::memory_order_relaxed);
  }
  out.write_rmw = writer_counters_.rmw.load(std::memory_order_relaxed);
  return out;
}

RegisterStats RfRegister::stats() const noexcept {
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
