#pragma once

#include "arc/arc_register.hpp"

namespace arc::testing {

// Reaches into an ARC register to stage states the public API only reaches
// through particular interleavings.
struct ArcPeer {
  template <class R>
  static void set_counters(R& reg, std::uint32_t slot, std::uint32_t r_start, std::uint32_t r_end) {
    reg.slots_[slot].r_start.store(r_start);
    reg.slots_[slot].r_end.store(r_end);
  }
  template <class R>
  static void set_proposal(R& reg, std::uint32_t slot) {
    reg.proposal_.store(slot);
  }
  template <class R>
  static void set_current(R& reg, std::uint64_t raw) {
    reg.current_.store(raw);
  }
  template <class W>
  static void set_last_slot(W& writer, std::uint32_t slot) {
    writer.last_slot_ = slot;
  }
};

}  // namespace arc::testing
