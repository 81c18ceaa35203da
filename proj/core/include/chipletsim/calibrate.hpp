#pragma once

#include <map>
#include <string>
#include <vector>

#include "chipletsim/topology.hpp"

namespace csim {

// The free constants the fit may move. They are shared by all presets; only
// topology distinguishes exp1/exp2/exp3.
struct CalibrationParams {
  std::uint64_t n_groups = 0;
  std::uint32_t compute_cycles = 0;
  double mem_ratio = 0.0;
  SimTime dram_access_latency = 0;
  bool operator==(const CalibrationParams&) const = default;
};

struct CalibrationBounds {
  std::uint64_t n_groups_min = 8, n_groups_max = 1000000;
  std::uint32_t compute_min = 1, compute_max = 64;
  double mem_ratio_min = 0.05, mem_ratio_max = 0.9;
  SimTime access_min = 5 * kTicksPerNs, access_max = 200 * kTicksPerNs;
  double tolerance = 0.05;
  int budget = 200;  // total simulation runs
};

struct CalibrationResult {
  CalibrationParams params;
  std::map<std::string, double> achieved_mean_s;  // per preset
  std::map<std::string, double> relative_error;   // presets with a target
  int runs_used = 0;
  int iterations = 0;  // accepted parameter moves
  bool within_tolerance = false;
  std::vector<std::pair<std::string, SystemSpec>> presets;  // fitted exp1..exp3
};

CalibrationParams params_of(const SystemSpec& spec);
void apply_params(SystemSpec& spec, const CalibrationParams& p);

// Builds and runs the spec, returning the mean flow latency in seconds.
double run_mean_latency(const SystemSpec& spec);

// Deterministic coordinate search fitting exp1's mean flow latency to its
// target; exp2/exp3 are evaluated with the fitted constants but never used
// as fit inputs.
CalibrationResult calibrate(const CalibrationBounds& bounds = {});

}  // namespace csim
