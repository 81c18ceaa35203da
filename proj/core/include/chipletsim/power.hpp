#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chipletsim/des.hpp"
#include "chipletsim/workload.hpp"

namespace csim {

enum class PowerClass { Cluster, Dram, Mesh, D2D };

enum class EnergyClass {
  L1Hit,
  L2Hit,
  L3Hit,
  CacheMiss,
  FlitHop,
  D2DByte,
  DramAccess,
  CoreCycle,
};

struct PowerSpec {
  SimTime window = 100 * kTicksPerNs;

  struct StaticMw {
    double cluster = 100.0;
    double dram = 50.0;
    double mesh = 30.0;
    double d2d = 20.0;
    bool operator==(const StaticMw&) const = default;
  } static_mw;

  // Integer picojoules per event class; power is derived only at reporting
  // time.
  struct EnergyPj {
    std::uint64_t l1_hit = 1;
    std::uint64_t l2_hit = 5;
    std::uint64_t l3_hit = 10;
    std::uint64_t cache_miss = 2;
    std::uint64_t flit_hop = 2;
    std::uint64_t d2d_byte = 1;
    std::uint64_t dram_access = 500;
    std::uint64_t core_cycle = 50;
    bool operator==(const EnergyPj&) const = default;
  } energy_pj;

  bool operator==(const PowerSpec&) const = default;

  std::uint64_t energy_for(EnergyClass cls) const;
  double static_for(PowerClass cls) const;
};

struct EnergyEvent {
  SimTime time = 0;
  std::uint32_t component = 0;
  EnergyClass cls = EnergyClass::L1Hit;
  std::uint64_t pj = 0;
};

// Per-component energy accumulator. Keeps the raw event log so a reporting
// pass (or a test oracle) can re-derive every series from scratch.
class EnergyAccountant {
 public:
  explicit EnergyAccountant(PowerSpec spec) : spec_(std::move(spec)) {}

  std::uint32_t add_component(std::string id, PowerClass cls);
  void record(std::uint32_t component, EnergyClass cls, std::uint64_t count, SimTime time);

  const std::vector<EnergyEvent>& log() const { return log_; }
  std::uint64_t cumulative_pj(std::uint32_t component) const { return cumulative_[component]; }
  std::uint64_t total_pj() const { return total_; }
  std::size_t component_count() const { return ids_.size(); }
  const std::string& component_id(std::uint32_t c) const { return ids_[c]; }
  PowerClass component_class(std::uint32_t c) const { return classes_[c]; }
  const PowerSpec& spec() const { return spec_; }

 private:
  PowerSpec spec_;
  std::vector<std::string> ids_;
  std::vector<PowerClass> classes_;
  std::vector<std::uint64_t> cumulative_;
  std::uint64_t total_ = 0;
  std::vector<EnergyEvent> log_;
};

struct PowerSample {
  SimTime window_end = 0;
  std::string component_id;  // "ALL" for the system aggregate
  double instantaneous_mw = 0.0;
  double average_mw = 0.0;
};

// One sample per component per window covering [0, final_clock], windows
// are ((k-1)*w, k*w] with t=0 events folded into the first, plus the ALL
// aggregate. The aggregate's static power is the sum over components.
std::vector<PowerSample> power_series(const EnergyAccountant& acct, SimTime final_clock);

struct LatencyStats {
  std::size_t count = 0;
  double mean_s = 0.0;
  double p50_s = 0.0;  // lower median
  double max_s = 0.0;
  std::vector<FlowLatencyRecord> records;
};

LatencyStats flow_latency_stats(std::vector<FlowLatencyRecord> records);

}  // namespace csim
