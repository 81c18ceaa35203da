#include "chipletsim/power.hpp"

#include <algorithm>
#include <stdexcept>

namespace csim {

std::uint64_t PowerSpec::energy_for(EnergyClass cls) const {
  switch (cls) {
    case EnergyClass::L1Hit: return energy_pj.l1_hit;
    case EnergyClass::L2Hit: return energy_pj.l2_hit;
    case EnergyClass::L3Hit: return energy_pj.l3_hit;
    case EnergyClass::CacheMiss: return energy_pj.cache_miss;
    case EnergyClass::FlitHop: return energy_pj.flit_hop;
    case EnergyClass::D2DByte: return energy_pj.d2d_byte;
    case EnergyClass::DramAccess: return energy_pj.dram_access;
    case EnergyClass::CoreCycle: return energy_pj.core_cycle;
  }
  throw std::logic_error("unknown energy event class");
}

double PowerSpec::static_for(PowerClass cls) const {
  switch (cls) {
    case PowerClass::Cluster: return static_mw.cluster;
    case PowerClass::Dram: return static_mw.dram;
    case PowerClass::Mesh: return static_mw.mesh;
    case PowerClass::D2D: return static_mw.d2d;
  }
  throw std::logic_error("unknown power class");
}

std::uint32_t EnergyAccountant::add_component(std::string id, PowerClass cls) {
  ids_.push_back(std::move(id));
  classes_.push_back(cls);
  cumulative_.push_back(0);
  return static_cast<std::uint32_t>(ids_.size() - 1);
}

void EnergyAccountant::record(std::uint32_t component, EnergyClass cls, std::uint64_t count,
                              SimTime time) {
  if (count == 0) return;
  std::uint64_t pj = spec_.energy_for(cls) * count;
  if (pj == 0) return;
  cumulative_[component] += pj;
  total_ += pj;
  log_.push_back(EnergyEvent{time, component, cls, pj});
}

std::vector<PowerSample> power_series(const EnergyAccountant& acct, SimTime final_clock) {
  const PowerSpec& spec = acct.spec();
  const SimTime w = spec.window;
  if (w == 0) throw std::invalid_argument("power window must be positive");
  const std::uint64_t n_windows = std::max<std::uint64_t>(1, (final_clock + w - 1) / w);
  const std::size_t n_comp = acct.component_count();

  // window_pj[k][comp]; t=0 lands in window 0, otherwise window (t-1)/w.
  std::vector<std::vector<std::uint64_t>> window_pj(n_windows,
                                                    std::vector<std::uint64_t>(n_comp, 0));
  for (const EnergyEvent& ev : acct.log()) {
    std::uint64_t k = ev.time == 0 ? 0 : (ev.time - 1) / w;
    if (k >= n_windows) k = n_windows - 1;
    window_pj[k][ev.component] += ev.pj;
  }

  double static_all = 0.0;
  for (std::size_t c = 0; c < n_comp; ++c)
    static_all += spec.static_for(acct.component_class(static_cast<std::uint32_t>(c)));

  std::vector<PowerSample> out;
  out.reserve(n_windows * (n_comp + 1));
  std::vector<std::uint64_t> cum(n_comp, 0);
  std::uint64_t cum_all = 0;
  for (std::uint64_t k = 0; k < n_windows; ++k) {
    const SimTime end = (k + 1) * w;
    std::uint64_t win_all = 0;
    for (std::size_t c = 0; c < n_comp; ++c) {
      cum[c] += window_pj[k][c];
      win_all += window_pj[k][c];
      const double stat = spec.static_for(acct.component_class(static_cast<std::uint32_t>(c)));
      // 1 pJ/ps = 1 W, so mW = 1000 * pJ / ticks.
      out.push_back(PowerSample{
          end, acct.component_id(static_cast<std::uint32_t>(c)),
          stat + 1000.0 * static_cast<double>(window_pj[k][c]) / static_cast<double>(w),
          stat + 1000.0 * static_cast<double>(cum[c]) / static_cast<double>(end)});
    }
    cum_all += win_all;
    out.push_back(PowerSample{
        end, "ALL", static_all + 1000.0 * static_cast<double>(win_all) / static_cast<double>(w),
        static_all + 1000.0 * static_cast<double>(cum_all) / static_cast<double>(end)});
  }
  return out;
}

LatencyStats flow_latency_stats(std::vector<FlowLatencyRecord> records) {
  if (records.empty()) throw std::invalid_argument("no flow latency records");
  LatencyStats stats;
  std::vector<double> lat;
  lat.reserve(records.size());
  for (const auto& r : records) lat.push_back(ticks_to_seconds(r.end - r.start));
  std::sort(lat.begin(), lat.end());
  double sum = 0.0;
  for (double v : lat) sum += v;
  stats.count = records.size();
  stats.mean_s = sum / static_cast<double>(lat.size());
  stats.p50_s = lat[(lat.size() - 1) / 2];
  stats.max_s = lat.back();
  stats.records = std::move(records);
  return stats;
}

}  // namespace csim
