#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "chipletsim/topology.hpp"

namespace csim {

struct MeshDims {
  std::uint32_t cols = 1;
  std::uint32_t rows = 1;
};

enum class MsgClass { Req, DatRsp, Wb };

constexpr std::uint32_t kHeaderBytes = 16;
constexpr std::uint32_t kMeshFlitBytes = 32;

// REQ carries only the header; responses and write-backs carry a line.
std::uint32_t message_bytes(MsgClass cls, std::uint32_t line_bytes);

// Dimension-ordered route: fully in X, then fully in Y. Returns the node
// sequence including src and dst; length-1 hops. Throws on out-of-bounds.
std::vector<Coord> xy_route(Coord src, Coord dst, MeshDims dims);

// Round-robin selection over a die's home-node or DRAM list.
std::size_t interleave_index(std::uint64_t addr, std::uint64_t granularity, std::size_t n);

// ceil(bytes / bandwidth) in whole ticks.
SimTime serialization_ticks(std::uint64_t bytes, double bytes_per_ns);

// Per-die mesh with one occupancy slot per directed link: a link grants one
// flit per NoC cycle, FIFO by request time.
class MeshFabric {
 public:
  MeshFabric(MeshDims dims, std::uint32_t hop_cycles, SimTime noc_clock);

  struct Transfer {
    SimTime arrival = 0;  // tail arrival at dst
    std::uint32_t flits = 0;
    std::uint32_t hops = 0;
  };

  // Must be called at the message's departure time; link grants are FIFO in
  // call order, which the kernel keeps aligned with (time, seq).
  Transfer transfer(std::uint32_t bytes, Coord src, Coord dst, SimTime depart);

  SimTime noc_cycle() const { return clock_; }
  SimTime hop_latency() const { return SimTime{hop_cycles_} * clock_; }
  MeshDims dims() const { return dims_; }
  SimTime link_next_free(Coord from, Coord to) const;

 private:
  std::size_t link_index(Coord from, Coord to) const;

  MeshDims dims_;
  std::uint32_t hop_cycles_;
  SimTime clock_;
  std::vector<SimTime> next_free_;  // 4 directed links per node
};

// UCIe-style gateway link: adapter latency plus bandwidth-limited
// serialization, full duplex with one occupancy slot per direction.
class D2DLink {
 public:
  explicit D2DLink(D2DLinkSpec spec) : spec_(std::move(spec)) {}

  // direction 0 = endpoints[0] -> endpoints[1].
  SimTime transfer(int direction, std::uint64_t bytes, SimTime depart);

  const D2DLinkSpec& spec() const { return spec_; }

 private:
  D2DLinkSpec spec_;
  std::array<SimTime, 2> next_free_{0, 0};
};

}  // namespace csim
