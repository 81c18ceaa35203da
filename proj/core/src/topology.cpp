#include "chipletsim/topology.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace csim {
namespace {

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

struct Check {
  std::vector<Diagnostic>& out;
  void add(const char* code, std::string path, std::string message) {
    out.push_back(Diagnostic{code, std::move(path), std::move(message)});
  }
};

void validate_cache(Check& c, const CacheSpec& s, const std::string& path) {
  if (s.associativity < 1) c.add("E_CACHE_GEOM", path, "associativity must be >= 1");
  if (!is_pow2(s.line_bytes)) c.add("E_CACHE_GEOM", path, "line_bytes must be a power of two");
  if (s.associativity >= 1 && s.line_bytes > 0 &&
      s.capacity_bytes % (std::uint64_t{s.line_bytes} * s.associativity) != 0) {
    c.add("E_CACHE_GEOM", path, "capacity not divisible by line_bytes * associativity");
  }
}

}  // namespace

const DieSpec* SystemSpec::find_die(std::string_view id) const {
  for (const auto& d : dies)
    if (d.id == id) return &d;
  return nullptr;
}

std::vector<Diagnostic> validate(const SystemSpec& spec) {
  std::vector<Diagnostic> out;
  Check c{out};

  if (spec.dies.empty()) c.add("E_NO_DIE", "dies", "at least one die is required");

  std::set<std::string> ids;
  auto claim_id = [&](const std::string& id, const std::string& path) {
    if (!ids.insert(id).second) c.add("E_DUP_ID", path, "duplicate component id '" + id + "'");
  };

  std::uint32_t max_line = 0;
  for (std::size_t di = 0; di < spec.dies.size(); ++di) {
    const DieSpec& die = spec.dies[di];
    const std::string dpath = "dies." + std::to_string(di);
    claim_id(die.id, dpath + ".id");
    if (die.mesh_cols == 0 || die.mesh_rows == 0) {
      c.add("E_BAD_VALUE", dpath, "mesh dimensions must be positive");
      continue;
    }
    std::set<Coord> used;
    auto place = [&](Coord at, const std::string& path) {
      if (at.x < 0 || at.y < 0 || static_cast<std::uint32_t>(at.x) >= die.mesh_cols ||
          static_cast<std::uint32_t>(at.y) >= die.mesh_rows) {
        c.add("E_BAD_COORD", path, "coordinate outside mesh bounds");
        return;
      }
      if (!used.insert(at).second)
        c.add("E_COORD_CLASH", path,
              "coordinate (" + std::to_string(at.x) + "," + std::to_string(at.y) + ") already taken");
    };
    for (std::size_t i = 0; i < die.clusters.size(); ++i) {
      const ClusterSpec& cl = die.clusters[i];
      const std::string cpath = dpath + ".clusters." + std::to_string(i);
      claim_id(cl.id, cpath + ".id");
      place(cl.coord, cpath + ".coord");
      if (cl.cores < 1) c.add("E_BAD_VALUE", cpath + ".cores", "cores must be >= 1");
      if (cl.clock_period == 0) c.add("E_BAD_VALUE", cpath + ".clock_period", "must be positive");
      validate_cache(c, cl.l1i, cpath + ".l1i");
      validate_cache(c, cl.l1d, cpath + ".l1d");
      validate_cache(c, cl.l2, cpath + ".l2");
      validate_cache(c, cl.l3, cpath + ".l3");
      if (!(cl.l1d.line_bytes == cl.l1i.line_bytes && cl.l1d.line_bytes == cl.l2.line_bytes &&
            cl.l1d.line_bytes == cl.l3.line_bytes)) {
        c.add("E_LINE_MISMATCH", cpath, "cache line sizes must match across levels");
      }
      if (cl.l1d.capacity_bytes > cl.l2.capacity_bytes ||
          cl.l2.capacity_bytes > cl.l3.capacity_bytes) {
        c.add("E_CACHE_ORDER", cpath, "capacities must be non-decreasing L1 <= L2 <= L3");
      }
      max_line = std::max(max_line, cl.l1d.line_bytes);
    }
    for (std::size_t i = 0; i < die.home_nodes.size(); ++i)
      place(die.home_nodes[i], dpath + ".home_nodes." + std::to_string(i));
    for (std::size_t i = 0; i < die.drams.size(); ++i) {
      const DramSpec& dr = die.drams[i];
      const std::string mpath = dpath + ".drams." + std::to_string(i);
      claim_id(dr.id, mpath + ".id");
      place(dr.coord, mpath + ".coord");
      if (dr.bandwidth_bytes_per_ns <= 0.0)
        c.add("E_BAD_VALUE", mpath + ".bandwidth_bytes_per_ns", "bandwidth must be positive");
      if (dr.queue_capacity < 1)
        c.add("E_BAD_VALUE", mpath + ".queue_capacity", "must be >= 1");
    }
    for (std::size_t i = 0; i < die.gateways.size(); ++i)
      place(die.gateways[i], dpath + ".gateways." + std::to_string(i));
    if (!die.drams.empty() && die.home_nodes.empty())
      c.add("E_NO_HOME", dpath, "die has DRAM but no home node");
  }

  for (std::size_t li = 0; li < spec.d2d_links.size(); ++li) {
    const D2DLinkSpec& l = spec.d2d_links[li];
    const std::string lpath = "d2d_links." + std::to_string(li);
    claim_id(l.id, lpath + ".id");
    if (l.bandwidth_bytes_per_ns <= 0.0)
      c.add("E_BAD_VALUE", lpath + ".bandwidth_bytes_per_ns", "bandwidth must be positive");
    if (!is_pow2(l.flit_bytes))
      c.add("E_BAD_VALUE", lpath + ".flit_bytes", "must be a power of two");
    if (l.endpoints[0].die == l.endpoints[1].die)
      c.add("E_BAD_ENDPOINT", lpath, "endpoints must reference two distinct dies");
    for (std::size_t e = 0; e < 2; ++e) {
      const std::string epath = lpath + ".endpoints." + std::to_string(e);
      const DieSpec* die = spec.find_die(l.endpoints[e].die);
      if (!die) {
        c.add("E_BAD_ENDPOINT", epath, "unknown die '" + l.endpoints[e].die + "'");
        continue;
      }
      if (std::find(die->gateways.begin(), die->gateways.end(), l.endpoints[e].gateway) ==
          die->gateways.end()) {
        c.add("E_BAD_ENDPOINT", epath, "gateway coordinate not declared on die");
      }
    }
  }

  const CalibrationSpec& cal = spec.calibration;
  if (!is_pow2(cal.interleave_granularity_bytes) || cal.interleave_granularity_bytes < max_line)
    c.add("E_BAD_GRANULARITY", "calibration.interleave_granularity_bytes",
          "must be a power of two >= the cache line size");
  if (cal.noc_clock_period == 0)
    c.add("E_BAD_VALUE", "calibration.noc_clock_period", "must be positive");
  if (cal.noc_hop_latency_cycles == 0)
    c.add("E_BAD_VALUE", "calibration.noc_hop_latency_cycles", "must be positive");

  std::set<std::uint64_t> flow_ids;
  for (std::size_t fi = 0; fi < spec.workload.flows.size(); ++fi) {
    const FlowSpec& f = spec.workload.flows[fi];
    const std::string fpath = "workload.flows." + std::to_string(fi);
    if (!flow_ids.insert(f.id).second)
      c.add("E_DUP_FLOW", fpath + ".id", "duplicate flow id");
    const DieSpec* die = spec.find_die(f.die);
    const ClusterSpec* cluster = nullptr;
    if (die) {
      for (const auto& cl : die->clusters)
        if (cl.id == f.cluster) cluster = &cl;
    }
    if (!die || !cluster) {
      c.add("E_BAD_FLOW_BINDING", fpath, "flow bound to unknown die/cluster");
    } else if (f.core >= cluster->cores) {
      c.add("E_BAD_FLOW_BINDING", fpath + ".core", "core index out of range");
    }
    if (f.n_groups < 1) c.add("E_BAD_VALUE", fpath + ".n_groups", "must be >= 1");
    if (f.compute_cycles_per_group < 1)
      c.add("E_BAD_VALUE", fpath + ".compute_cycles_per_group", "must be >= 1");
    if (f.mem_ratio < 0.0 || f.mem_ratio > 1.0)
      c.add("E_BAD_VALUE", fpath + ".mem_ratio", "must be in [0, 1]");
    if (f.read_fraction < 0.0 || f.read_fraction > 1.0)
      c.add("E_BAD_VALUE", fpath + ".read_fraction", "must be in [0, 1]");
    std::uint64_t base = 0, footprint = 0;
    if (const auto* s = std::get_if<StridedPattern>(&f.address_pattern)) {
      base = s->base;
      footprint = s->footprint_bytes;
      if (s->stride_bytes == 0) c.add("E_BAD_VALUE", fpath + ".address_pattern.stride_bytes",
                                      "must be positive");
    } else {
      const auto& u = std::get<UniformPattern>(f.address_pattern);
      base = u.base;
      footprint = u.footprint_bytes;
    }
    if (cluster && footprint < cluster->l1d.line_bytes)
      c.add("E_BAD_VALUE", fpath + ".address_pattern.footprint_bytes",
            "footprint must be >= the cache line size");
    if (base + footprint > kDieSpanBytes * spec.dies.size())
      c.add("E_ADDR_RANGE", fpath + ".address_pattern",
            "footprint extends past the last die's address span");
  }

  if (spec.power.window == 0) c.add("E_BAD_VALUE", "power.window", "must be positive");
  const auto& st = spec.power.static_mw;
  if (st.cluster < 0 || st.dram < 0 || st.mesh < 0 || st.d2d < 0)
    c.add("E_BAD_VALUE", "power.static_mw", "static power must be >= 0");

  return out;
}

namespace {

// Shared timing/energy/workload constants for the three presets; only the
// topology (and the flow bindings it implies) differs between them. Values
// are the calibration output baked in (see the calibrate subcommand).
struct PresetConstants {
  SimTime clock_period = 500;
  CacheSpec l1{16 * 1024, 64, 4, 2};
  CacheSpec l2{64 * 1024, 64, 8, 6};
  CacheSpec l3{256 * 1024, 64, 16, 14};
  SimTime dram_access_latency = 60 * kTicksPerNs;
  double dram_bandwidth = 16.0;
  std::uint32_t dram_queue = 8;
  std::uint32_t noc_hop_cycles = 2;
  SimTime noc_clock = 1 * kTicksPerNs;
  std::uint64_t granularity = 1ull << 20;
  double d2d_bandwidth = 32.0;
  SimTime d2d_adapter = 4 * kTicksPerNs;
  std::uint32_t d2d_flit = 64;
  std::uint64_t n_groups = 215;
  std::uint32_t compute_cycles = 8;
  double mem_ratio = 0.45;
  double read_fraction = 0.8;
  std::uint64_t footprint = 1ull << 20;
  std::uint64_t stride = 64;
  std::uint64_t seed = 42;
};

ClusterSpec make_cluster(const PresetConstants& k, std::string id, Coord at) {
  ClusterSpec c;
  c.id = std::move(id);
  c.coord = at;
  c.cores = 1;
  c.clock_period = k.clock_period;
  c.l1i = k.l1;
  c.l1d = k.l1;
  c.l2 = k.l2;
  c.l3 = k.l3;
  return c;
}

DramSpec make_dram(const PresetConstants& k, std::string id, Coord at) {
  DramSpec d;
  d.id = std::move(id);
  d.coord = at;
  d.access_latency = k.dram_access_latency;
  d.bandwidth_bytes_per_ns = k.dram_bandwidth;
  d.queue_capacity = k.dram_queue;
  return d;
}

FlowSpec make_flow(const PresetConstants& k, std::uint64_t id, std::string die, std::string cluster,
                   std::uint64_t base) {
  FlowSpec f;
  f.id = id;
  f.die = std::move(die);
  f.cluster = std::move(cluster);
  f.core = 0;
  f.n_groups = k.n_groups;
  f.compute_cycles_per_group = k.compute_cycles;
  f.mem_ratio = k.mem_ratio;
  f.read_fraction = k.read_fraction;
  f.address_pattern = StridedPattern{k.stride, k.footprint, base};
  return f;
}

SystemSpec shared_scaffold(const PresetConstants& k) {
  SystemSpec s;
  s.calibration.noc_hop_latency_cycles = k.noc_hop_cycles;
  s.calibration.noc_clock_period = k.noc_clock;
  s.calibration.interleave_granularity_bytes = k.granularity;
  s.calibration.target_latencies_s = {{"exp1", 1.17e-5}, {"exp2", 1.14e-5}, {"exp3", 1.16e-5}};
  s.workload.seed = k.seed;
  return s;
}

D2DLinkSpec make_link(const PresetConstants& k, std::string id, const std::string& die_a, Coord gw_a,
                      const std::string& die_b, Coord gw_b) {
  D2DLinkSpec l;
  l.id = std::move(id);
  l.endpoints = {D2DEndpoint{die_a, gw_a}, D2DEndpoint{die_b, gw_b}};
  l.bandwidth_bytes_per_ns = k.d2d_bandwidth;
  l.adapter_latency = k.d2d_adapter;
  l.flit_bytes = k.d2d_flit;
  return l;
}

// Experiment 1: one die, two clusters sharing the mesh and the DRAM system.
// Both flows walk the same shared buffer, so their requests serialize on
// the same home node and DRAM module.
SystemSpec make_exp1(const PresetConstants& k) {
  SystemSpec s = shared_scaffold(k);
  DieSpec die;
  die.id = "die0";
  die.mesh_cols = 3;
  die.mesh_rows = 2;
  die.clusters = {make_cluster(k, "cpu0", {0, 0}), make_cluster(k, "cpu1", {0, 1})};
  die.home_nodes = {{1, 0}, {1, 1}};
  die.drams = {make_dram(k, "dram0", {2, 0}), make_dram(k, "dram1", {2, 1})};
  s.dies.push_back(std::move(die));
  s.workload.flows = {make_flow(k, 0, "die0", "cpu0", 0),
                      make_flow(k, 1, "die0", "cpu1", 0)};
  return s;
}

// Experiment 2: two dies, each with one cluster and a dedicated DRAM; a
// single UCIe link joins the gateways. Each flow stays on its own die.
SystemSpec make_exp2(const PresetConstants& k) {
  SystemSpec s = shared_scaffold(k);
  for (int d = 0; d < 2; ++d) {
    DieSpec die;
    die.id = "die" + std::to_string(d);
    die.mesh_cols = 2;
    die.mesh_rows = 2;
    die.clusters = {make_cluster(k, "cpu" + std::to_string(d), {0, 0})};
    die.home_nodes = {{1, 0}};
    die.drams = {make_dram(k, "dram" + std::to_string(d), {1, 1})};
    die.gateways = {{0, 1}};
    s.dies.push_back(std::move(die));
  }
  s.d2d_links = {make_link(k, "ucie0", "die0", {0, 1}, "die1", {0, 1})};
  s.workload.flows = {make_flow(k, 0, "die0", "cpu0", 0),
                      make_flow(k, 1, "die1", "cpu1", kDieSpanBytes)};
  return s;
}

// Experiment 3: the chiplet design scaled to two clusters and two DRAMs per
// die. Each cluster owns a distinct interleave block, so local traffic is
// contention-free; one flow per die works on a buffer homed on the other
// die, which is the inter-chiplet traffic the UCIe link carries.
SystemSpec make_exp3(const PresetConstants& k) {
  SystemSpec s = shared_scaffold(k);
  for (int d = 0; d < 2; ++d) {
    DieSpec die;
    die.id = "die" + std::to_string(d);
    die.mesh_cols = 3;
    die.mesh_rows = 3;
    const int cbase = 2 * d;
    die.clusters = {make_cluster(k, "cpu" + std::to_string(cbase), {0, 0}),
                    make_cluster(k, "cpu" + std::to_string(cbase + 1), {0, 2})};
    die.home_nodes = {{1, 0}, {1, 2}};
    die.drams = {make_dram(k, "dram" + std::to_string(cbase), {2, 0}),
                 make_dram(k, "dram" + std::to_string(cbase + 1), {2, 2})};
    die.gateways = {{1, 1}};
    s.dies.push_back(std::move(die));
  }
  s.d2d_links = {make_link(k, "ucie0", "die0", {1, 1}, "die1", {1, 1})};
  const std::uint64_t blk = k.granularity;
  s.workload.flows = {make_flow(k, 0, "die0", "cpu0", 0),
                      make_flow(k, 1, "die0", "cpu1", kDieSpanBytes + blk),
                      make_flow(k, 2, "die1", "cpu2", kDieSpanBytes),
                      make_flow(k, 3, "die1", "cpu3", blk)};
  return s;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"exp1", "exp2", "exp3"};
  return names;
}

SystemSpec preset(const std::string& name) {
  PresetConstants k;
  if (name == "exp1") return make_exp1(k);
  if (name == "exp2") return make_exp2(k);
  if (name == "exp3") return make_exp3(k);
  throw std::invalid_argument("unknown preset '" + name + "' (valid: exp1|exp2|exp3)");
}

std::uint64_t spec_content_hash(const SystemSpec& spec) {
  const std::string bytes = serialize(spec);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace csim
