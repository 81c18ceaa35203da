#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chipletsim/topology.hpp"

namespace csim {

// Set-associative tag array with LRU replacement, write-back and
// write-allocate. Timing-only: tags and dirty bits, no data.
class SetAssocCache {
 public:
  SetAssocCache(const CacheSpec& spec, SimTime clock_period);

  struct AccessResult {
    bool hit = false;
    std::optional<std::uint64_t> writeback;  // dirty victim line address
  };

  // Probe and, on miss, allocate (evicting LRU). Writes mark the line dirty.
  AccessResult access(std::uint64_t addr, bool is_write);

  // Lookup only; hit refreshes recency (and dirtiness for writes).
  bool probe(std::uint64_t addr, bool is_write);

  // Allocate a line, returning the evicted dirty victim if any.
  std::optional<std::uint64_t> install(std::uint64_t addr, bool dirty);

  SimTime hit_latency() const { return hit_latency_; }
  std::uint32_t line_bytes() const { return line_bytes_; }
  std::uint64_t line_of(std::uint64_t addr) const { return addr & ~(std::uint64_t{line_bytes_} - 1); }

 private:
  struct Way {
    std::uint64_t line = 0;
    bool dirty = false;
  };

  std::size_t set_of(std::uint64_t line_addr) const {
    return static_cast<std::size_t>((line_addr / line_bytes_) % n_sets_);
  }

  std::vector<std::vector<Way>> sets_;  // MRU first
  std::uint32_t line_bytes_;
  std::uint32_t associativity_;
  std::uint64_t n_sets_;
  SimTime hit_latency_;
};

enum class HitLevel { L1 = 1, L2 = 2, L3 = 3, Memory = 0 };

struct HierarchyResult {
  HitLevel level = HitLevel::Memory;
  SimTime latency = 0;                      // accumulated probe latencies
  std::vector<std::uint64_t> writebacks;    // dirty victim line addresses
};

// Per-cluster hierarchy: private L1D per core, shared L2 and L3 slice.
// Probing is serial L1 -> L2 -> L3 with additive hit latencies; a full miss
// allocates at each probed level on the way (the fill merged into the walk)
// and escalates to the mesh. Dirty victims at any level become write-back
// transactions headed for memory. Non-inclusive; no back-invalidation.
class CacheHierarchy {
 public:
  explicit CacheHierarchy(const ClusterSpec& spec);

  HierarchyResult access(std::uint32_t core, std::uint64_t addr, bool is_write);

  std::uint32_t line_bytes() const { return line_bytes_; }

 private:
  std::vector<SetAssocCache> l1d_;  // one per core
  SetAssocCache l2_;
  SetAssocCache l3_;
  std::uint32_t line_bytes_;
};

}  // namespace csim
