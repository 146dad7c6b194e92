#include "arc/peterson_register.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "arc/errors.hpp"

namespace arc {

PetersonRegister::Reader::Reader(std::uint32_t id, std::size_t max_size)
    : id_(id), first_(max_size, scratch_stats_), second_(max_size, scratch_stats_) {}

PetersonRegister::PetersonRegister(Payload initial, std::uint32_t readers, std::size_t max_size)
    : readers_(readers), max_size_(max_size) {
  if (readers < 1) throw CapacityError("at least one reader is required");
  if (max_size == 0) throw ConfigError("max_size must be positive");
  if (initial.empty() || initial.size() > max_size) {
    throw ConfigError("initial payload size " + std::to_string(initial.size()) +
                      " outside 1.." + std::to_string(max_size));
  }
  first_ = ContentBuffer(max_size, buffers_stats_);
  second_ = ContentBuffer(max_size, buffers_stats_);
  shared_ = std::make_unique<ReaderShared[]>(readers);
  for (std::uint32_t i = 0; i < readers; ++i) {
    shared_[i].copy = ContentBuffer(max_size, buffers_stats_);
  }
  std::memcpy(first_.data(), initial.data(), initial.size());
  std::memcpy(second_.data(), initial.data(), initial.size());
  first_size_.store(initial.size(), std::memory_order_relaxed);
  second_size_.store(initial.size(), std::memory_order_release);
}

PetersonRegister::Reader PetersonRegister::make_reader() {
  const std::uint32_t id = readers_made_.fetch_add(1, std::memory_order_relaxed);
  if (id >= readers_) {
    readers_made_.fetch_sub(1, std::memory_order_relaxed);
    throw CapacityError("register was built for " + std::to_string(readers_) + " readers");
  }
  return Reader(id, max_size_);
}

PetersonRegister::Writer PetersonRegister::make_writer() {
  if (writer_made_.exchange(true)) throw CapacityError("register already has its writer");
  return Writer();
}

std::span<const std::byte> PetersonRegister::read(Reader& reader) noexcept {
  ReaderShared& me = shared_[reader.id_];
  detail::bump(me.reads);

  const bool reading = !me.writing.load(std::memory_order_seq_cst);
  me.reading.store(reading, std::memory_order_seq_cst);

  const bool flag1 = writer_flag_.load(std::memory_order_seq_cst);
  const bool sw1 = switch_.load(std::memory_order_seq_cst);
  const std::size_t n1 = std::min<std::size_t>(first_size_.load(std::memory_order_relaxed), max_size_);
  detail::racy_load_words(reader.first_.data(), first_.data(), n1);
  std::atomic_thread_fence(std::memory_order_acquire);

  const bool flag2 = writer_flag_.load(std::memory_order_seq_cst);
  const bool sw2 = switch_.load(std::memory_order_seq_cst);
  const std::size_t n2 = std::min<std::size_t>(second_size_.load(std::memory_order_relaxed), max_size_);
  detail::racy_load_words(reader.second_.data(), second_.data(), n2);
  std::atomic_thread_fence(std::memory_order_acquire);

  if (me.writing.load(std::memory_order_seq_cst) == reading) {
    return me.copy.view(me.copy_size);  // the writer served us a copy
  }
  if (sw1 != sw2 || flag1 || flag2) return reader.second_.view(n2);
  return reader.first_.view(n1);
}

void PetersonRegister::write(Writer&, Payload value) {
  if (value.empty() || value.size() > max_size_) {
    throw ConfigError("payload size " + std::to_string(value.size()) + " outside 1.." +
                      std::to_string(max_size_));
  }

  writer_flag_.store(true, std::memory_order_seq_cst);
  std::atomic_thread_fence(std::memory_order_seq_cst);
  first_size_.store(value.size(), std::memory_order_relaxed);
  detail::racy_store_words(first_.data(), value.data(), value.size());
  switch_.store(!switch_.load(std::memory_order_relaxed), std::memory_order_seq_cst);
  writer_flag_.store(false, std::memory_order_seq_cst);

  for (std::uint32_t i = 0; i < readers_; ++i) {
    ReaderShared& r = shared_[i];
    const bool reading = r.reading.load(std::memory_order_seq_cst);
    if (reading != r.writing.load(std::memory_order_relaxed)) {
      std::memcpy(r.copy.data(), value.data(), value.size());
      r.copy_size = value.size();
      r.writing.store(reading, std::memory_order_seq_cst);
    }
  }

  std::atomic_thread_fence(std::memory_order_seq_cst);
  second_size_.store(value.size(), std::memory_order_relaxed);
  detail::racy_store_words(second_.data(), value.data(), value.size());
  std::atomic_thread_fence(std::memory_order_seq_cst);
  detail::bump(writes_);
}

RegisterStats PetersonRegister::stats() const noexcept {
  RegisterStats out;
  for (std::uint32_t i = 0; i < readers_; ++i) {
    out.reads += shared_[i].reads.load(std::memory_order_relaxed);
  }
  out.writes = writes_.load(std::memory_order_relaxed);
  return out;
}

}  // namespace arc
