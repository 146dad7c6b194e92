#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace arc {

/// Bytes handed to a register write. Views are never mutated by the register.
using Payload = std::span<const std::byte>;

enum class RegisterKind { kArc, kRf, kPeterson, kRwlock };

std::string_view to_string(RegisterKind kind);
/// Accepts the upper-case names used on the command line and in CSV output
/// (ARC, RF, PETERSON, RWLOCK). Throws ConfigError otherwise.
RegisterKind parse_register_kind(std::string_view name);

// Versioned payloads fill the whole buffer with the 64-bit sequence number,
// repeated in little-endian order, so that a read mixing bytes from two
// different writes fails a single linear scan.

inline constexpr std::size_t kMinVersionedSize = 8;

struct Decoded {
  std::uint64_t seq;
  bool intact;
};

/// Writes the versioned encoding of `seq` into `out` (size = out.size()).
/// Throws ConfigError if out.size() < 8.
void encode_versioned_into(std::uint64_t seq, std::span<std::byte> out);

/// Returns a fresh buffer of `size` bytes. Throws ConfigError when size is
/// below 8 or above max_size.
std::vector<std::byte> encode_versioned(std::uint64_t seq, std::size_t size,
                                        std::size_t max_size = SIZE_MAX);

/// seq is the first word; intact is true iff every full word and the trailing
/// partial word agree with it. Bodies shorter than 8 bytes decode as
/// {0, false}.
Decoded decode_versioned(std::span<const std::byte> body) noexcept;

}  // namespace arc
