#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chipletsim/des.hpp"
#include "chipletsim/power.hpp"
#include "chipletsim/topology.hpp"

namespace csim {

// One memory access's journey core -> caches -> mesh -> (D2D) -> DRAM and
// back. Write-backs travel the same way but produce no response.
struct MemTransaction {
  std::uint64_t id = 0;
  std::uint32_t origin_die = 0;
  std::string origin_cluster;
  std::uint32_t origin_core = 0;
  std::uint64_t addr = 0;
  bool is_read = true;
  bool is_writeback = false;
  std::uint32_t bytes = 64;
  SimTime issue_time = 0;
  SimTime completion_time = 0;         // set on DAT delivery / write-back drain
  bool completed = false;
  std::vector<std::string> path_log;   // component ids visited, for tests
};

struct RunCounters {
  std::uint64_t transactions_issued = 0;
  std::uint64_t transactions_completed = 0;
  std::uint64_t messages_injected = 0;
  std::uint64_t messages_delivered = 0;
  std::uint64_t dram_accesses = 0;
  std::uint64_t groups_executed = 0;
};

struct RunReport {
  RunStats stats;
  SimTime final_clock = 0;
  std::vector<FlowLatencyRecord> flows;
  std::vector<PowerSample> power;
  RunCounters counters;
  std::uint64_t total_energy_pj = 0;
};

// An instantiated component graph bound to a fresh kernel, with the
// workload's initial events seeded. Single-threaded; independent instances
// may run in parallel.
class SystemInstance {
 public:
  ~SystemInstance();
  SystemInstance(const SystemInstance&) = delete;
  SystemInstance& operator=(const SystemInstance&) = delete;

  // Runs to workload completion, or to `until` if given (power windows then
  // end exactly there).
  RunReport run(std::optional<SimTime> until = std::nullopt);

  const SystemSpec& spec() const;
  const std::vector<MemTransaction>& transactions() const;
  const EnergyAccountant& energy() const;

  void enable_trace();
  const std::vector<TraceEntry>& trace() const;

  struct Shape {
    std::size_t clusters = 0;
    std::size_t drams = 0;
    std::size_t meshes = 0;
    std::size_t d2d_links = 0;
    std::size_t home_nodes = 0;
  };
  Shape shape() const;

 private:
  friend std::unique_ptr<SystemInstance> build_system(const SystemSpec& spec);
  SystemInstance();
  struct Detail;
  std::unique_ptr<Detail> d_;
};

// Requires validate(spec) to be clean; throws std::invalid_argument listing
// the first diagnostic otherwise.
std::unique_ptr<SystemInstance> build_system(const SystemSpec& spec);

}  // namespace csim
