#pragma once

#include <stdexcept>
#include <string>

namespace arc {

/// Too many readers requested, or a reader count outside what the register
/// can represent.
class CapacityError : public std::length_error {
 public:
  explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

/// Bad sizes or otherwise inconsistent construction parameters.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A recorded history contains a read whose value was never written.
class CorruptedHistoryError : public std::runtime_error {
 public:
  explicit CorruptedHistoryError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace arc
