#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "chipletsim/des.hpp"
#include "chipletsim/power.hpp"
#include "chipletsim/workload.hpp"

namespace csim {

struct Coord {
  std::int32_t x = 0;
  std::int32_t y = 0;
  bool operator==(const Coord&) const = default;
  auto operator<=>(const Coord&) const = default;
};

struct CacheSpec {
  std::uint64_t capacity_bytes = 0;
  std::uint32_t line_bytes = 64;
  std::uint32_t associativity = 1;
  std::uint32_t hit_latency_cycles = 1;
  bool operator==(const CacheSpec&) const = default;
};

struct ClusterSpec {
  std::string id;
  Coord coord;
  std::uint32_t cores = 1;
  SimTime clock_period = 500;  // ticks per core cycle
  CacheSpec l1i;
  CacheSpec l1d;
  CacheSpec l2;
  CacheSpec l3;
  bool operator==(const ClusterSpec&) const = default;
};

struct DramSpec {
  std::string id;
  Coord coord;
  SimTime access_latency = 50 * kTicksPerNs;
  double bandwidth_bytes_per_ns = 16.0;
  std::uint32_t queue_capacity = 8;
  bool operator==(const DramSpec&) const = default;
};

struct DieSpec {
  std::string id;
  std::uint32_t mesh_cols = 0;  // 0 = smallest grid that fits the nodes
  std::uint32_t mesh_rows = 0;
  std::vector<ClusterSpec> clusters;
  std::vector<Coord> home_nodes;
  std::vector<DramSpec> drams;
  std::vector<Coord> gateways;
  bool operator==(const DieSpec&) const = default;
};

struct D2DEndpoint {
  std::string die;
  Coord gateway;
  bool operator==(const D2DEndpoint&) const = default;
};

struct D2DLinkSpec {
  std::string id;
  std::array<D2DEndpoint, 2> endpoints;
  double bandwidth_bytes_per_ns = 32.0;
  SimTime adapter_latency = 10 * kTicksPerNs;
  std::uint32_t flit_bytes = 64;
  bool operator==(const D2DLinkSpec&) const = default;
};

struct CalibrationSpec {
  std::uint32_t noc_hop_latency_cycles = 2;
  SimTime noc_clock_period = 1 * kTicksPerNs;
  std::uint64_t interleave_granularity_bytes = 4096;
  std::map<std::string, double> target_latencies_s;  // keys exp1|exp2|exp3
  bool operator==(const CalibrationSpec&) const = default;
};

struct SystemSpec {
  std::vector<DieSpec> dies;
  std::vector<D2DLinkSpec> d2d_links;
  CalibrationSpec calibration;
  WorkloadSpec workload;
  PowerSpec power;
  bool operator==(const SystemSpec&) const = default;

  const DieSpec* find_die(std::string_view id) const;
};

// Physical address layout: die k owns [k*kDieSpanBytes, (k+1)*kDieSpanBytes)
// in declaration order.
constexpr std::uint64_t kDieSpanBytes = 1ull << 40;

inline std::size_t die_index_of_addr(std::uint64_t addr) {
  return static_cast<std::size_t>(addr / kDieSpanBytes);
}

struct ConfigError : std::runtime_error {
  ConfigError(std::string p, const std::string& message)
      : std::runtime_error(p.empty() ? message : p + ": " + message), path(std::move(p)) {}
  std::string path;
};

struct Diagnostic {
  std::string code;
  std::string path;
  std::string message;
};

// Strict-schema JSON: unknown keys are rejected, required keys must be
// present, SimTime fields are integer picoseconds.
SystemSpec parse_config(std::string_view text);
std::string serialize(const SystemSpec& spec);

std::vector<Diagnostic> validate(const SystemSpec& spec);

const std::vector<std::string>& preset_names();
SystemSpec preset(const std::string& name);

// FNV-1a over the canonical serialization; identifies a resolved spec in
// summaries and sweep reports.
std::uint64_t spec_content_hash(const SystemSpec& spec);

}  // namespace csim
