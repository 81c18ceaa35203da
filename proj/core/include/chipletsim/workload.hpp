#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chipletsim/des.hpp"

namespace csim {

// splitmix64. Fixed bit-for-bit so every run (and any reimplementation in
// another language) produces the same stream.
struct Rng {
  std::uint64_t state = 0;

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) using the top 53 bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Each flow draws from its own stream so adding or removing a flow never
// perturbs the others.
inline Rng flow_rng(std::uint64_t global_seed, std::uint64_t flow_id) {
  Rng seeder{global_seed ^ flow_id};
  return Rng{seeder.next()};
}

struct StridedPattern {
  std::uint64_t stride_bytes = 64;
  std::uint64_t footprint_bytes = 0;
  std::uint64_t base = 0;
  bool operator==(const StridedPattern&) const = default;
};

struct UniformPattern {
  std::uint64_t footprint_bytes = 0;
  std::uint64_t base = 0;
  bool operator==(const UniformPattern&) const = default;
};

using AddressPattern = std::variant<StridedPattern, UniformPattern>;

struct FlowSpec {
  std::uint64_t id = 0;
  std::string die;
  std::string cluster;
  std::uint32_t core = 0;
  std::uint64_t n_groups = 1;
  std::uint32_t compute_cycles_per_group = 1;
  double mem_ratio = 0.0;      // probability a group issues a memory access
  double read_fraction = 1.0;  // probability that access is a read
  AddressPattern address_pattern = StridedPattern{};
  bool operator==(const FlowSpec&) const = default;
};

struct WorkloadSpec {
  std::uint64_t seed = 0;
  std::vector<FlowSpec> flows;
  bool operator==(const WorkloadSpec&) const = default;
};

struct MemAccessDesc {
  std::uint64_t addr = 0;
  bool is_read = true;
  std::uint32_t bytes = 0;
  bool operator==(const MemAccessDesc&) const = default;
};

struct GroupAccess {
  std::uint64_t group_index = 0;
  std::optional<MemAccessDesc> access;
};

struct FlowLatencyRecord {
  std::uint64_t flow_id = 0;
  SimTime start = 0;
  SimTime end = 0;
};

// Expands a flow into its per-group access stream. Draw order per group is
// fixed: access? -> read? -> (uniform only) address word. Strided addresses
// advance by one stride per memory group and wrap inside the footprint.
std::vector<GroupAccess> gen_access_stream(const FlowSpec& flow, std::uint64_t global_seed,
                                           std::uint32_t line_bytes);

}  // namespace csim
