#include "arc/payload.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "arc/errors.hpp"

namespace arc {
namespace {

constexpr std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) {
      r = (r << 8) | ((v >> (8 * i)) & 0xff);
    }
    return r;
  }
}

}  // namespace

std::string_view to_string(RegisterKind kind) {
  switch (kind) {
    case RegisterKind::kArc:
      return "ARC";
    case RegisterKind::kRf:
      return "RF";
    case RegisterKind::kPeterson:
      return "PETERSON";
    case RegisterKind::kRwlock:
      return "RWLOCK";
  }
  return "?";
}

RegisterKind parse_register_kind(std::string_view name) {
  for (auto kind : {RegisterKind::kArc, RegisterKind::kRf, RegisterKind::kPeterson,
                    RegisterKind::kRwlock}) {
    if (name == to_string(kind)) return kind;
  }
  throw ConfigError("unknown register kind: " + std::string(name));
}

void encode_versioned_into(std::uint64_t seq, std::span<std::byte> out) {
  if (out.size() < kMinVersionedSize) {
    throw ConfigError("versioned payload needs at least 8 bytes, got " +
                      std::to_string(out.size()));
  }
  const std::uint64_t word = to_little_endian(seq);
  const std::size_t full = out.size() / 8;
  std::byte* p = out.data();
  for (std::size_t i = 0; i < full; ++i, p += 8) {
    std::memcpy(p, &word, 8);
  }
  // Trailing partial word: low-order bytes of seq come first in LE layout.
  std::memcpy(p, &word, out.size() % 8);
}

std::vector<std::byte> encode_versioned(std::uint64_t seq, std::size_t size,
                                        std::size_t max_size) {
  if (size > max_size) {
    throw ConfigError("payload size " + std::to_string(size) + " exceeds max_size " +
                      std::to_string(max_size));
  }
  if (size < kMinVersionedSize) {
    throw ConfigError("versioned payload needs at least 8 bytes, got " +
                      std::to_string(size));
  }
  std::vector<std::byte> body(size);
  encode_versioned_into(seq, body);
  return body;
}

Decoded decode_versioned(std::span<const std::byte> body) noexcept {
  if (body.size() < kMinVersionedSize) return {0, false};
  std::uint64_t first = 0;
  std::memcpy(&first, body.data(), 8);

  const std::size_t full = body.size() / 8;
  const std::byte* p = body.data();
  std::uint64_t diff = 0;
  for (std::size_t i = 1; i < full; ++i) {
    std::uint64_t w;
    std::memcpy(&w, p + 8 * i, 8);
    diff |= w ^ first;
  }
  const std::size_t tail = body.size() % 8;
  if (tail != 0) {
    bool tail_ok = std::memcmp(p + 8 * full, &first, tail) == 0;
    if (!tail_ok) diff |= 1;
  }
  return {to_little_endian(first), diff == 0};
}

}  // namespace arc
