#pragma once

#include <cstdint>

#include "chipletsim/topology.hpp"

namespace csim {

// Completion time of one access: service starts when the module is free and
// the request has arrived, then costs the fixed access latency plus the
// bandwidth-limited burst transfer.
SimTime dram_completion(const DramSpec& spec, SimTime arrive, SimTime busy_until,
                        std::uint32_t bytes);

// Bounded-FIFO module timing state. Slots are claimed when the home node
// forwards a request (so in-flight requests count against the queue) and
// released on completion; a full queue backpressures the home.
class DramModule {
 public:
  explicit DramModule(DramSpec spec) : spec_(std::move(spec)) {}

  bool can_accept() const { return occupied_ < spec_.queue_capacity; }
  void claim_slot() { ++occupied_; }

  // Returns the completion time and chains busy_until forward.
  SimTime enqueue(SimTime arrive, std::uint32_t bytes);

  void complete() {
    --occupied_;
    ++served_;
  }

  SimTime busy_until() const { return busy_until_; }
  std::uint64_t served() const { return served_; }
  std::uint32_t occupied() const { return occupied_; }
  const DramSpec& spec() const { return spec_; }

 private:
  DramSpec spec_;
  SimTime busy_until_ = 0;
  std::uint32_t occupied_ = 0;
  std::uint64_t served_ = 0;
};

}  // namespace csim
