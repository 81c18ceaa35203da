// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail. Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chipletsim/cache.hpp"
#include "chipletsim/dram.hpp"
#include "chipletsim/mesh.hpp"
#include "chipletsim/report.hpp"
#include "chipletsim/system.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace csim;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::function<bool(std::string&)> check;
};

RunReport run_preset(const std::string& name) {
  auto inst = build_system(preset(name));
  return inst->run();
}

double mean_latency_of(const RunReport& r) { return flow_latency_stats(r.flows).mean_s; }

double final_avg_power(const RunReport& r) {
  for (auto it = r.power.rbegin(); it != r.power.rend(); ++it)
    if (it->component_id == "ALL") return it->average_mw;
  return 0.0;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1. Calibrated exp1 mean Beh-Flow-Latency within +-5% of 1.17e-5 s.
bool c1_exp1_latency(std::string& msg) {
  const double target = 1.17e-5;
  const double mean = mean_latency_of(run_preset("exp1"));
  const double err = std::abs(mean - target) / target;
  char buf[128];
  snprintf(buf, sizeof buf, "mean %.6e s, target %.2e s, rel. error %.2f%% (limit 5%%)", mean,
           target, err * 100.0);
  msg = buf;
  return err <= 0.05;
}

// 2. Held-out ordering with shared constants: exp2 < exp1, exp2 <= exp3 <= exp1.
bool c2_latency_ordering(std::string& msg) {
  const double e1 = mean_latency_of(run_preset("exp1"));
  const double e2 = mean_latency_of(run_preset("exp2"));
  const double e3 = mean_latency_of(run_preset("exp3"));
  char buf[160];
  snprintf(buf, sizeof buf, "exp1 %.4e, exp2 %.4e, exp3 %.4e", e1, e2, e3);
  msg = buf;
  return e2 < e1 && e2 <= e3 && e3 <= e1;
}

// 3. Power ordering exp1 < exp2 < exp3; exp1 instantaneous CV < 10% after
// warm-up (windows past 10% of the run, while all flows are still active).
bool c3_power(std::string& msg) {
  const RunReport r1 = run_preset("exp1");
  const RunReport r2 = run_preset("exp2");
  const RunReport r3 = run_preset("exp3");
  const double p1 = final_avg_power(r1), p2 = final_avg_power(r2), p3 = final_avg_power(r3);

  SimTime first_end = r1.final_clock;
  for (const auto& f : r1.flows) first_end = std::min(first_end, f.end);
  std::vector<double> window;
  for (const auto& s : r1.power) {
    if (s.component_id != "ALL") continue;
    if (s.window_end > r1.final_clock / 10 && s.window_end <= first_end)
      window.push_back(s.instantaneous_mw);
  }
  double mean = 0.0;
  for (double v : window) mean += v;
  mean /= static_cast<double>(window.size());
  double var = 0.0;
  for (double v : window) var += (v - mean) * (v - mean);
  const double cv = std::sqrt(var / static_cast<double>(window.size())) / mean;

  char buf[200];
  snprintf(buf, sizeof buf, "avg power %.1f < %.1f < %.1f mW; exp1 CV %.2f%% (limit 10%%)", p1, p2,
           p3, cv * 100.0);
  msg = buf;
  return p1 < p2 && p2 < p3 && cv < 0.10;
}

// 4. Two equal-seed runs of any preset produce byte-identical artifacts.
bool c4_determinism(std::string& msg) {
  const fs::path base = fs::temp_directory_path() / "chipletsim_acceptance_det";
  fs::remove_all(base);
  for (const auto& name : preset_names()) {
    const SystemSpec spec = preset(name);
    for (int round = 0; round < 2; ++round) {
      auto inst = build_system(spec);
      const RunReport report = inst->run();
      write_run_artifacts(spec, report, base / (name + "_" + std::to_string(round)), name);
    }
    for (const char* f : {"latency.csv", "power.csv", "summary.json", "power.svg", "latency.svg"}) {
      if (slurp(base / (name + "_0") / f) != slurp(base / (name + "_1") / f)) {
        msg = name + "/" + f + " differs between equal-seed runs";
        return false;
      }
    }
  }
  msg = "latency.csv, power.csv, summary.json and SVGs byte-identical for every preset";
  return true;
}

// 5. XY path length equals BFS shortest-path distance, exhaustive to 5x5.
bool c5_routing_oracle(std::string& msg) {
  std::size_t pairs = 0;
  for (std::uint32_t cols = 1; cols <= 5; ++cols)
    for (std::uint32_t rows = 1; rows <= 5; ++rows)
      for (std::int32_t sx = 0; sx < static_cast<std::int32_t>(cols); ++sx)
        for (std::int32_t sy = 0; sy < static_cast<std::int32_t>(rows); ++sy)
          for (std::int32_t dx = 0; dx < static_cast<std::int32_t>(cols); ++dx)
            for (std::int32_t dy = 0; dy < static_cast<std::int32_t>(rows); ++dy) {
              const int hops = static_cast<int>(
                  xy_route({sx, sy}, {dx, dy}, MeshDims{cols, rows}).size() - 1);
              if (hops != oracle::bfs_distance(static_cast<int>(cols), static_cast<int>(rows), sx,
                                               sy, dx, dy)) {
                msg = "mismatch on a " + std::to_string(cols) + "x" + std::to_string(rows) + " mesh";
                return false;
              }
              ++pairs;
            }
  msg = std::to_string(pairs) + " src/dst pairs checked against BFS";
  return true;
}

// 6. Hierarchy hit/miss sequence equals a brute-force LRU simulator:
// 100 random traces of 1e4 accesses.
bool c6_lru_oracle(std::string& msg) {
  std::mt19937_64 gen(0xCACE);
  for (int trace = 0; trace < 100; ++trace) {
    ClusterSpec cs;
    cs.id = "c";
    cs.clock_period = 500;
    const std::uint32_t a1 = 1 + static_cast<std::uint32_t>(gen() % 4);
    const std::uint32_t a2 = 1 + static_cast<std::uint32_t>(gen() % 8);
    const std::uint32_t a3 = 1 + static_cast<std::uint32_t>(gen() % 8);
    cs.l1d = CacheSpec{std::uint64_t{64} * a1 * (1u << (gen() % 3)), 64, a1, 2};
    cs.l1i = cs.l1d;
    cs.l2 = CacheSpec{std::uint64_t{64} * a2 * (1u << (2 + gen() % 3)), 64, a2, 6};
    cs.l3 = CacheSpec{std::uint64_t{64} * a3 * (1u << (4 + gen() % 3)), 64, a3, 14};
    CacheHierarchy dut(cs);
    oracle::LruHierarchy ref{oracle::LruCache(cs.l1d.capacity_bytes, 64, a1),
                             oracle::LruCache(cs.l2.capacity_bytes, 64, a2),
                             oracle::LruCache(cs.l3.capacity_bytes, 64, a3)};
    const std::uint64_t universe = 64 + gen() % 1024;
    for (int i = 0; i < 10000; ++i) {
      const std::uint64_t addr = (gen() % universe) * 64;
      const bool write = (gen() & 1) != 0;
      const auto got = dut.access(0, addr, write);
      const auto expect = ref.access(addr, write);
      if (static_cast<int>(got.level) != expect.level || got.writebacks != expect.writebacks) {
        msg = "divergence in trace " + std::to_string(trace) + " at access " + std::to_string(i);
        return false;
      }
    }
  }
  msg = "100 traces x 10000 accesses match (hit level and write-backs)";
  return true;
}

// 7. DRAM completion times equal a hand-rolled FIFO queue simulation.
bool c7_queueing_oracle(std::string& msg) {
  std::mt19937_64 gen(0xD7A3);
  for (int schedule = 0; schedule < 50; ++schedule) {
    DramSpec spec;
    spec.id = "m";
    spec.access_latency = 1000 * (5 + gen() % 150);
    spec.bandwidth_bytes_per_ns = static_cast<double>(4 + gen() % 60);
    spec.queue_capacity = 256;
    DramModule module(spec);
    const int n = 64;
    std::vector<std::uint64_t> arrivals, service, got;
    std::uint64_t t = 0;
    for (int i = 0; i < n; ++i) {
      t += gen() % (2 * spec.access_latency);
      arrivals.push_back(t);
      service.push_back(spec.access_latency +
                        serialization_ticks(64, spec.bandwidth_bytes_per_ns));
      module.claim_slot();
      got.push_back(module.enqueue(arrivals.back(), 64));
    }
    if (got != oracle::fifo_completions(arrivals, service)) {
      msg = "divergence in schedule " + std::to_string(schedule);
      return false;
    }
  }
  msg = "50 random arrival schedules match the FIFO reference";
  return true;
}

// 8. Conservation on every preset: transactions balance, window energies sum
// exactly, and the average-power identity holds to 1 ulp.
bool c8_conservation(std::string& msg) {
  for (const auto& name : preset_names()) {
    auto inst = build_system(preset(name));
    const RunReport r = inst->run();
    if (r.counters.transactions_issued != r.counters.transactions_completed) {
      msg = name + ": issued != completed";
      return false;
    }
    const EnergyAccountant& acct = inst->energy();

    // Exact integer re-aggregation of the event log.
    std::uint64_t log_total = 0;
    for (const auto& ev : acct.log()) log_total += ev.pj;
    std::uint64_t comp_total = 0;
    for (std::uint32_t c = 0; c < acct.component_count(); ++c) comp_total += acct.cumulative_pj(c);
    if (log_total != acct.total_pj() || comp_total != acct.total_pj()) {
      msg = name + ": energy log and cumulative totals disagree";
      return false;
    }

    // Exact integer window sums: bucket the event log per (window, comp)
    // and require the per-component sums to reproduce the cumulative pJ and
    // the emitted instantaneous samples bit for bit.
    const PowerSpec& p = acct.spec();
    SimTime last_end = 0;
    for (const auto& s : r.power)
      if (s.component_id != "ALL") last_end = s.window_end;
    std::vector<std::vector<std::uint64_t>> win_pj(
        last_end / p.window, std::vector<std::uint64_t>(acct.component_count(), 0));
    for (const auto& ev : acct.log()) {
      const std::uint64_t k = ev.time == 0 ? 0 : (ev.time - 1) / p.window;
      win_pj[std::min<std::uint64_t>(k, win_pj.size() - 1)][ev.component] += ev.pj;
    }
    for (std::uint32_t c = 0; c < acct.component_count(); ++c) {
      std::uint64_t sum = 0;
      for (const auto& w : win_pj) sum += w[c];
      if (sum != acct.cumulative_pj(c)) {
        msg = name + "/" + acct.component_id(c) + ": window energies != cumulative (integer pJ)";
        return false;
      }
    }
    for (const auto& s : r.power) {
      if (s.component_id == "ALL") continue;
      std::uint32_t c = 0;
      while (acct.component_id(c) != s.component_id) ++c;
      const std::uint64_t k = s.window_end / p.window - 1;
      const double expect = p.static_for(acct.component_class(c)) +
                            1000.0 * static_cast<double>(win_pj[k][c]) /
                                static_cast<double>(p.window);
      if (s.instantaneous_mw != expect) {
        msg = name + ": instantaneous sample disagrees with the re-aggregated log";
        return false;
      }
    }

    for (std::uint32_t c = 0; c < acct.component_count(); ++c) {
      double final_avg = -1.0;
      for (auto it = r.power.rbegin(); it != r.power.rend(); ++it) {
        if (it->component_id == acct.component_id(c)) {
          final_avg = it->average_mw;
          break;
        }
      }
      const double expected = p.static_for(acct.component_class(c)) +
                              1000.0 * static_cast<double>(acct.cumulative_pj(c)) /
                                  static_cast<double>(last_end);
      const double ulp = std::nextafter(expected, INFINITY) - expected;
      if (std::abs(final_avg - expected) > ulp) {
        msg = name + "/" + acct.component_id(c) + ": average identity off by more than 1 ulp";
        return false;
      }
    }
  }
  msg = "transaction, energy, and average-power identities hold on exp1/exp2/exp3";
  return true;
}

// 9. Monotonic sweeps on exp2.
bool c9_sweeps(std::string& msg) {
  std::vector<double> lat_bw;
  for (double bw : {16.0, 32.0, 64.0}) {
    SystemSpec spec = preset("exp2");
    spec.d2d_links[0].bandwidth_bytes_per_ns = bw;
    auto inst = build_system(spec);
    lat_bw.push_back(mean_latency_of(inst->run()));
  }
  for (std::size_t i = 1; i < lat_bw.size(); ++i) {
    if (lat_bw[i] > lat_bw[i - 1]) {
      msg = "mean latency increased with D2D bandwidth";
      return false;
    }
  }
  std::vector<double> lat_dram;
  for (SimTime ns : {SimTime{25}, SimTime{50}, SimTime{100}}) {
    SystemSpec spec = preset("exp2");
    spec.dies[0].drams[0].access_latency = ns * kTicksPerNs;
    auto inst = build_system(spec);
    lat_dram.push_back(mean_latency_of(inst->run()));
  }
  for (std::size_t i = 1; i < lat_dram.size(); ++i) {
    if (lat_dram[i] < lat_dram[i - 1]) {
      msg = "mean latency decreased with DRAM access latency";
      return false;
    }
  }
  char buf[200];
  snprintf(buf, sizeof buf,
           "bw sweep %.4e/%.4e/%.4e non-increasing; dram sweep %.4e/%.4e/%.4e non-decreasing",
           lat_bw[0], lat_bw[1], lat_bw[2], lat_dram[0], lat_dram[1], lat_dram[2]);
  msg = buf;
  return true;
}

// 10. Single-core two-read micro config: end-to-end latency equals the
// hand-computed sum of the configured constants, to the tick.
bool c10_micro(std::string& msg) {
  const SimTime clock_period = 500;
  const std::uint32_t compute_cycles = 8, l1_cy = 2, l2_cy = 10, l3_cy = 30, hop_cy = 2;
  const SimTime noc_clock = 1000, dram_latency = 50000;
  const double dram_bw = 16.0;
  const std::uint32_t line = 64;

  SystemSpec s;
  DieSpec die;
  die.id = "die0";
  die.mesh_cols = 3;
  die.mesh_rows = 1;
  ClusterSpec cl;
  cl.id = "cpu0";
  cl.coord = {0, 0};
  cl.clock_period = clock_period;
  cl.l1d = CacheSpec{16384, line, 4, l1_cy};
  cl.l1i = cl.l1d;
  cl.l2 = CacheSpec{65536, line, 8, l2_cy};
  cl.l3 = CacheSpec{262144, line, 16, l3_cy};
  die.clusters.push_back(cl);
  die.home_nodes = {{1, 0}};
  DramSpec m;
  m.id = "m0";
  m.coord = {2, 0};
  m.access_latency = dram_latency;
  m.bandwidth_bytes_per_ns = dram_bw;
  die.drams.push_back(m);
  s.dies.push_back(die);
  s.calibration.noc_hop_latency_cycles = hop_cy;
  s.calibration.noc_clock_period = noc_clock;
  s.calibration.interleave_granularity_bytes = 4096;
  FlowSpec f;
  f.id = 0;
  f.die = "die0";
  f.cluster = "cpu0";
  f.n_groups = 2;
  f.compute_cycles_per_group = compute_cycles;
  f.mem_ratio = 1.0;
  f.read_fraction = 1.0;
  f.address_pattern = StridedPattern{line, 2 * std::uint64_t{line}, 0};
  s.workload.flows.push_back(f);
  s.workload.seed = 42;

  // Stage-by-stage sum for one cold read.
  const SimTime hop = SimTime{hop_cy} * noc_clock;
  const SimTime compute = SimTime{compute_cycles} * clock_period;
  const SimTime probes = SimTime{l1_cy + l2_cy + l3_cy} * clock_period;
  const std::uint32_t dat_flits = (16 + line + kMeshFlitBytes - 1) / kMeshFlitBytes;
  const SimTime req_leg = 1 * hop;                               // 1 flit, 1 hop
  const SimTime home_cycle = noc_clock;                          // home serialization
  const SimTime fwd_leg = 1 * hop;                               // home -> dram
  const SimTime dram = dram_latency + serialization_ticks(line, dram_bw);
  const SimTime dat_leg = 2 * hop + (dat_flits - 1) * noc_clock; // dram -> cluster
  const SimTime expected =
      2 * (compute + probes + req_leg + home_cycle + fwd_leg + dram + dat_leg);

  auto inst = build_system(s);
  const RunReport r = inst->run();
  char buf[128];
  snprintf(buf, sizeof buf, "measured %llu ticks, hand-computed %llu ticks",
           static_cast<unsigned long long>(r.flows[0].end),
           static_cast<unsigned long long>(expected));
  msg = buf;
  return r.flows.size() == 1 && r.flows[0].start == 0 && r.flows[0].end == expected &&
         r.final_clock == expected;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "calibrated exp1 mean Beh-Flow-Latency = 1.17e-5 s +-5%", c1_exp1_latency},
      {2, "held-out latency ordering exp2 < exp1, exp2 <= exp3 <= exp1", c2_latency_ordering},
      {3, "power ordering exp1 < exp2 < exp3; exp1 CV < 10%", c3_power},
      {4, "equal-seed runs are byte-identical (CSV + SVG)", c4_determinism},
      {5, "XY routing equals BFS shortest paths (exhaustive to 5x5)", c5_routing_oracle},
      {6, "cache hierarchy equals brute-force LRU (100 x 1e4 accesses)", c6_lru_oracle},
      {7, "DRAM timing equals a hand-rolled FIFO queue (50 schedules)", c7_queueing_oracle},
      {8, "conservation: transactions, window energy, power identity", c8_conservation},
      {9, "monotonic sweeps on exp2 (D2D bandwidth, DRAM latency)", c9_sweeps},
      {10, "micro config end-to-end latency exact to the tick", c10_micro},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string msg;
    bool ok = false;
    try {
      ok = c.check(msg);
    } catch (const std::exception& e) {
      msg = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    printf("[%s] criterion %2d (%.2fs): %s — %s\n", ok ? "PASS" : "FAIL", c.id, secs,
           c.title.c_str(), msg.c_str());
    if (!ok) ++failures;
  }
  if (failures == 0) {
    printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
