#include "chipletsim/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chipletsim/system.hpp"

namespace csim {

CalibrationParams params_of(const SystemSpec& spec) {
  if (spec.workload.flows.empty() || spec.dies.empty() || spec.dies.front().drams.empty())
    throw std::invalid_argument("spec has no flows or DRAM to calibrate");
  const FlowSpec& f = spec.workload.flows.front();
  return CalibrationParams{f.n_groups, f.compute_cycles_per_group, f.mem_ratio,
                           spec.dies.front().drams.front().access_latency};
}

void apply_params(SystemSpec& spec, const CalibrationParams& p) {
  for (FlowSpec& f : spec.workload.flows) {
    f.n_groups = p.n_groups;
    f.compute_cycles_per_group = p.compute_cycles;
    f.mem_ratio = p.mem_ratio;
  }
  for (DieSpec& d : spec.dies)
    for (DramSpec& m : d.drams) m.access_latency = p.dram_access_latency;
}

double run_mean_latency(const SystemSpec& spec) {
  auto instance = build_system(spec);
  const RunReport report = instance->run();
  return flow_latency_stats(report.flows).mean_s;
}

namespace {

template <typename T>
T clamp_to(T v, T lo, T hi) {
  return std::min(std::max(v, lo), hi);
}

}  // namespace

CalibrationResult calibrate(const CalibrationBounds& bounds) {
  const SystemSpec base = preset("exp1");
  const auto target_it = base.calibration.target_latencies_s.find("exp1");
  if (target_it == base.calibration.target_latencies_s.end())
    throw std::invalid_argument("preset exp1 carries no latency target");
  const double target = target_it->second;

  CalibrationResult result;
  int runs = 0;

  auto evaluate = [&](const CalibrationParams& p) {
    SystemSpec s = base;
    apply_params(s, p);
    ++runs;
    return run_mean_latency(s);
  };
  auto rel_err = [&](double mean) { return std::abs(mean - target) / target; };

  CalibrationParams current = params_of(base);
  double mean = evaluate(current);

  if (rel_err(mean) > bounds.tolerance) {
    // Coordinate order is fixed; each pass proposes a small deterministic
    // candidate set per parameter and keeps the best strict improvement.
    for (int round = 0; round < 8 && runs < bounds.budget; ++round) {
      if (rel_err(mean) <= bounds.tolerance) break;

      // n_groups: flow latency is nearly linear in group count, so jump
      // straight to the rescaled value.
      {
        const double scaled = static_cast<double>(current.n_groups) * target / mean;
        const std::uint64_t cand = clamp_to<std::uint64_t>(
            static_cast<std::uint64_t>(std::llround(scaled)), bounds.n_groups_min,
            bounds.n_groups_max);
        if (cand != current.n_groups && runs < bounds.budget) {
          CalibrationParams p = current;
          p.n_groups = cand;
          const double m = evaluate(p);
          if (rel_err(m) < rel_err(mean)) {
            current = p;
            mean = m;
            ++result.iterations;
          }
        }
      }
      if (rel_err(mean) <= bounds.tolerance) break;

      // dram access latency: geometric neighborhood.
      for (double factor : {0.5, 0.8, 1.25, 2.0}) {
        if (runs >= bounds.budget) break;
        CalibrationParams p = current;
        p.dram_access_latency = clamp_to<SimTime>(
            static_cast<SimTime>(std::llround(static_cast<double>(current.dram_access_latency) *
                                              factor)),
            bounds.access_min, bounds.access_max);
        if (p.dram_access_latency == current.dram_access_latency) continue;
        const double m = evaluate(p);
        if (rel_err(m) < rel_err(mean)) {
          current = p;
          mean = m;
          ++result.iterations;
          break;
        }
      }
      if (rel_err(mean) <= bounds.tolerance) break;

      // compute cycles: small integer steps.
      for (int delta : {-2, -1, 1, 2}) {
        if (runs >= bounds.budget) break;
        const std::int64_t cand = static_cast<std::int64_t>(current.compute_cycles) + delta;
        if (cand < static_cast<std::int64_t>(bounds.compute_min) ||
            cand > static_cast<std::int64_t>(bounds.compute_max))
          continue;
        CalibrationParams p = current;
        p.compute_cycles = static_cast<std::uint32_t>(cand);
        const double m = evaluate(p);
        if (rel_err(m) < rel_err(mean)) {
          current = p;
          mean = m;
          ++result.iterations;
          break;
        }
      }
      if (rel_err(mean) <= bounds.tolerance) break;

      // mem ratio: geometric neighborhood.
      for (double factor : {0.8, 0.9, 1.1, 1.25}) {
        if (runs >= bounds.budget) break;
        CalibrationParams p = current;
        p.mem_ratio = clamp_to(current.mem_ratio * factor, bounds.mem_ratio_min,
                               bounds.mem_ratio_max);
        if (p.mem_ratio == current.mem_ratio) continue;
        const double m = evaluate(p);
        if (rel_err(m) < rel_err(mean)) {
          current = p;
          mean = m;
          ++result.iterations;
          break;
        }
      }
    }
  }

  result.params = current;
  result.within_tolerance = rel_err(mean) <= bounds.tolerance;

  for (const std::string& name : preset_names()) {
    SystemSpec s = preset(name);
    apply_params(s, current);
    const double m = name == "exp1" ? mean : run_mean_latency(s);
    result.achieved_mean_s[name] = m;
    const auto it = s.calibration.target_latencies_s.find(name);
    if (it != s.calibration.target_latencies_s.end())
      result.relative_error[name] = std::abs(m - it->second) / it->second;
    result.presets.emplace_back(name, std::move(s));
  }
  result.runs_used = runs;
  return result;
}

}  // namespace csim
