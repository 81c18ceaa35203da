#include "chipletsim/dram.hpp"

#include <algorithm>
#include <stdexcept>

#include "chipletsim/mesh.hpp"

namespace csim {

SimTime dram_completion(const DramSpec& spec, SimTime arrive, SimTime busy_until,
                        std::uint32_t bytes) {
  const SimTime start = std::max(arrive, busy_until);
  return start + spec.access_latency + serialization_ticks(bytes, spec.bandwidth_bytes_per_ns);
}

SimTime DramModule::enqueue(SimTime arrive, std::uint32_t bytes) {
  if (occupied_ == 0) throw std::logic_error("dram enqueue without a claimed slot");
  busy_until_ = dram_completion(spec_, arrive, busy_until_, bytes);
  return busy_until_;
}

}  // namespace csim
