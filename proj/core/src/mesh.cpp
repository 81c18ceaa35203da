#include "chipletsim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace csim {

std::uint32_t message_bytes(MsgClass cls, std::uint32_t line_bytes) {
  switch (cls) {
    case MsgClass::Req: return kHeaderBytes;
    case MsgClass::DatRsp:
    case MsgClass::Wb: return kHeaderBytes + line_bytes;
  }
  throw std::logic_error("unknown message class");
}

static void check_bounds(Coord c, MeshDims dims, const char* which) {
  if (c.x < 0 || c.y < 0 || static_cast<std::uint32_t>(c.x) >= dims.cols ||
      static_cast<std::uint32_t>(c.y) >= dims.rows) {
    throw std::out_of_range(std::string(which) + " coordinate (" + std::to_string(c.x) + "," +
                            std::to_string(c.y) + ") outside " + std::to_string(dims.cols) + "x" +
                            std::to_string(dims.rows) + " mesh");
  }
}

std::vector<Coord> xy_route(Coord src, Coord dst, MeshDims dims) {
  check_bounds(src, dims, "source");
  check_bounds(dst, dims, "destination");
  std::vector<Coord> path{src};
  Coord at = src;
  while (at.x != dst.x) {
    at.x += at.x < dst.x ? 1 : -1;
    path.push_back(at);
  }
  while (at.y != dst.y) {
    at.y += at.y < dst.y ? 1 : -1;
    path.push_back(at);
  }
  return path;
}

std::size_t interleave_index(std::uint64_t addr, std::uint64_t granularity, std::size_t n) {
  return static_cast<std::size_t>((addr / granularity) % n);
}

SimTime serialization_ticks(std::uint64_t bytes, double bytes_per_ns) {
  if (bytes == 0) return 0;
  return static_cast<SimTime>(
      std::ceil(static_cast<double>(bytes) * 1000.0 / bytes_per_ns));
}

MeshFabric::MeshFabric(MeshDims dims, std::uint32_t hop_cycles, SimTime noc_clock)
    : dims_(dims), hop_cycles_(hop_cycles), clock_(noc_clock) {
  next_free_.assign(std::size_t{dims.cols} * dims.rows * 4, 0);
}

std::size_t MeshFabric::link_index(Coord from, Coord to) const {
  int dir;
  if (to.x == from.x + 1 && to.y == from.y) dir = 0;
  else if (to.x == from.x - 1 && to.y == from.y) dir = 1;
  else if (to.y == from.y + 1 && to.x == from.x) dir = 2;
  else if (to.y == from.y - 1 && to.x == from.x) dir = 3;
  else throw std::logic_error("non-adjacent hop");
  return (static_cast<std::size_t>(from.y) * dims_.cols + static_cast<std::size_t>(from.x)) * 4 +
         static_cast<std::size_t>(dir);
}

SimTime MeshFabric::link_next_free(Coord from, Coord to) const {
  return next_free_[link_index(from, to)];
}

MeshFabric::Transfer MeshFabric::transfer(std::uint32_t bytes, Coord src, Coord dst,
                                          SimTime depart) {
  const std::uint32_t flits = std::max<std::uint32_t>(1, (bytes + kMeshFlitBytes - 1) / kMeshFlitBytes);
  if (src == dst) {
    // Local delivery still costs one NoC cycle.
    check_bounds(src, dims_, "source");
    return Transfer{depart + clock_, flits, 0};
  }
  const std::vector<Coord> path = xy_route(src, dst, dims_);
  const SimTime hop_lat = hop_latency();
  SimTime head = depart;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    SimTime& free_at = next_free_[link_index(path[i], path[i + 1])];
    const SimTime grant = std::max(head, free_at);
    free_at = grant + SimTime{flits} * clock_;
    head = grant + hop_lat;
  }
  return Transfer{head + SimTime{flits - 1} * clock_, flits,
                  static_cast<std::uint32_t>(path.size() - 1)};
}

SimTime D2DLink::transfer(int direction, std::uint64_t bytes, SimTime depart) {
  SimTime& free_at = next_free_[static_cast<std::size_t>(direction)];
  const SimTime start = std::max(depart, free_at);
  const SimTime ser = serialization_ticks(bytes, spec_.bandwidth_bytes_per_ns);
  free_at = start + ser;
  return start + spec_.adapter_latency + ser;
}

}  // namespace csim
