#pragma once

// Brute-force atomicity oracle for small register histories: searches every
// total order of the operations that respects real-time precedence (and the
// writer's seq order) for one in which each read returns the latest write.
// Exponential; meant for histories of at most ~8 operations.

#include <cstdint>
#include <vector>

#include "arc/verify.hpp"

namespace arc::testing {

class LinearizationOracle {
 public:
  explicit LinearizationOracle(const History& h) : h_(h), placed_(h.ops.size(), false) {}

  bool linearizable() { return search(0, h_.initial_seq); }

 private:
  bool precedes(const OpRecord& a, const OpRecord& b) const {
    if (a.kind == OpKind::kWrite && b.kind == OpKind::kWrite) return a.seq < b.seq;
    return a.response_ts < b.invocation_ts;
  }

  bool ready(std::size_t i) const {
    for (std::size_t j = 0; j < h_.ops.size(); ++j) {
      if (!placed_[j] && j != i && precedes(h_.ops[j], h_.ops[i])) return false;
    }
    return true;
  }

  bool search(std::size_t count, std::uint64_t value) {
    if (count == h_.ops.size()) return true;
    for (std::size_t i = 0; i < h_.ops.size(); ++i) {
      if (placed_[i] || !ready(i)) continue;
      const OpRecord& op = h_.ops[i];
      if (op.kind == OpKind::kRead && op.seq != value) continue;
      placed_[i] = true;
      const bool ok = search(count + 1, op.kind == OpKind::kWrite ? op.seq : value);
      placed_[i] = false;
      if (ok) return true;
    }
    return false;
  }

  const History& h_;
  std::vector<bool> placed_;
};

inline bool linearizable(const History& h) { return LinearizationOracle(h).linearizable(); }

}  // namespace arc::testing
