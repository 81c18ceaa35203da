#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "chipletsim/topology.hpp"

namespace csim {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path, msg);
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string elem(const std::string& path, std::size_t i) {
  return path + "." + std::to_string(i);
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return it.key() == k; }) == allowed.end()) {
      fail(child(path, it.key()), "unknown key");
    }
  }
}

const json* get(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const json& require(const json& j, const char* key, const std::string& path) {
  const json* v = get(j, key);
  if (!v) fail(path, std::string("missing required key '") + key + "'");
  return *v;
}

std::uint64_t parse_u64(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) {
    if (j.get<std::int64_t>() < 0) fail(path, "must be non-negative");
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  }
  fail(path, "expected an integer");
}

std::uint32_t parse_u32(const json& j, const std::string& path) {
  std::uint64_t v = parse_u64(j, path);
  if (v > 0xFFFFFFFFull) fail(path, "value out of range");
  return static_cast<std::uint32_t>(v);
}

double parse_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::string parse_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

template <typename T, typename Fn>
void opt(const json& j, const char* key, const std::string& path, T& out, Fn fn) {
  if (const json* v = get(j, key)) out = fn(*v, child(path, key));
}

Coord parse_coord(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected a [x, y] pair");
  Coord c;
  c.x = static_cast<std::int32_t>(parse_u32(j[0], child(path, "x")));
  c.y = static_cast<std::int32_t>(parse_u32(j[1], child(path, "y")));
  return c;
}

CacheSpec parse_cache(const json& j, const std::string& path, const CacheSpec& defaults) {
  require_object(j, path);
  check_keys(j, path, {"capacity_bytes", "line_bytes", "associativity", "hit_latency_cycles"});
  CacheSpec c = defaults;
  opt(j, "capacity_bytes", path, c.capacity_bytes, parse_u64);
  opt(j, "line_bytes", path, c.line_bytes, parse_u32);
  opt(j, "associativity", path, c.associativity, parse_u32);
  opt(j, "hit_latency_cycles", path, c.hit_latency_cycles, parse_u32);
  return c;
}

ClusterSpec parse_cluster(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"id", "coord", "cores", "clock_period", "l1i", "l1d", "l2", "l3"});
  ClusterSpec c;
  c.id = parse_string(require(j, "id", path), child(path, "id"));
  c.coord = parse_coord(require(j, "coord", path), child(path, "coord"));
  opt(j, "cores", path, c.cores, parse_u32);
  opt(j, "clock_period", path, c.clock_period, parse_u64);
  if (const json* v = get(j, "l1i")) c.l1i = parse_cache(*v, child(path, "l1i"), c.l1i);
  if (const json* v = get(j, "l1d")) c.l1d = parse_cache(*v, child(path, "l1d"), c.l1d);
  if (const json* v = get(j, "l2")) c.l2 = parse_cache(*v, child(path, "l2"), c.l2);
  if (const json* v = get(j, "l3")) c.l3 = parse_cache(*v, child(path, "l3"), c.l3);
  return c;
}

DramSpec parse_dram(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"id", "coord", "access_latency", "bandwidth_bytes_per_ns", "queue_capacity"});
  DramSpec d;
  d.id = parse_string(require(j, "id", path), child(path, "id"));
  d.coord = parse_coord(require(j, "coord", path), child(path, "coord"));
  opt(j, "access_latency", path, d.access_latency, parse_u64);
  opt(j, "bandwidth_bytes_per_ns", path, d.bandwidth_bytes_per_ns, parse_double);
  opt(j, "queue_capacity", path, d.queue_capacity, parse_u32);
  return d;
}

DieSpec parse_die(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path,
             {"id", "mesh_cols", "mesh_rows", "clusters", "home_nodes", "drams", "gateways"});
  DieSpec d;
  d.id = parse_string(require(j, "id", path), child(path, "id"));
  opt(j, "mesh_cols", path, d.mesh_cols, parse_u32);
  opt(j, "mesh_rows", path, d.mesh_rows, parse_u32);
  if (const json* v = get(j, "clusters")) {
    if (!v->is_array()) fail(child(path, "clusters"), "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i)
      d.clusters.push_back(parse_cluster((*v)[i], elem(child(path, "clusters"), i)));
  }
  if (const json* v = get(j, "home_nodes")) {
    if (!v->is_array()) fail(child(path, "home_nodes"), "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i)
      d.home_nodes.push_back(parse_coord((*v)[i], elem(child(path, "home_nodes"), i)));
  }
  if (const json* v = get(j, "drams")) {
    if (!v->is_array()) fail(child(path, "drams"), "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i)
      d.drams.push_back(parse_dram((*v)[i], elem(child(path, "drams"), i)));
  }
  if (const json* v = get(j, "gateways")) {
    if (!v->is_array()) fail(child(path, "gateways"), "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i)
      d.gateways.push_back(parse_coord((*v)[i], elem(child(path, "gateways"), i)));
  }
  return d;
}

D2DLinkSpec parse_d2d(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"id", "endpoints", "bandwidth_bytes_per_ns", "adapter_latency", "flit_bytes"});
  D2DLinkSpec l;
  l.id = parse_string(require(j, "id", path), child(path, "id"));
  const json& eps = require(j, "endpoints", path);
  if (!eps.is_array() || eps.size() != 2) fail(child(path, "endpoints"), "expected exactly 2 endpoints");
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string epath = elem(child(path, "endpoints"), i);
    require_object(eps[i], epath);
    check_keys(eps[i], epath, {"die", "gateway"});
    l.endpoints[i].die = parse_string(require(eps[i], "die", epath), child(epath, "die"));
    l.endpoints[i].gateway = parse_coord(require(eps[i], "gateway", epath), child(epath, "gateway"));
  }
  opt(j, "bandwidth_bytes_per_ns", path, l.bandwidth_bytes_per_ns, parse_double);
  opt(j, "adapter_latency", path, l.adapter_latency, parse_u64);
  opt(j, "flit_bytes", path, l.flit_bytes, parse_u32);
  return l;
}

CalibrationSpec parse_calibration(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"noc_hop_latency_cycles", "noc_clock_period", "interleave_granularity_bytes",
                       "target_latencies_s"});
  CalibrationSpec c;
  opt(j, "noc_hop_latency_cycles", path, c.noc_hop_latency_cycles, parse_u32);
  opt(j, "noc_clock_period", path, c.noc_clock_period, parse_u64);
  opt(j, "interleave_granularity_bytes", path, c.interleave_granularity_bytes, parse_u64);
  if (const json* v = get(j, "target_latencies_s")) {
    const std::string tpath = child(path, "target_latencies_s");
    require_object(*v, tpath);
    check_keys(*v, tpath, {"exp1", "exp2", "exp3"});
    for (auto it = v->begin(); it != v->end(); ++it)
      c.target_latencies_s[it.key()] = parse_double(it.value(), child(tpath, it.key()));
  }
  return c;
}

AddressPattern parse_pattern(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string kind = parse_string(require(j, "kind", path), child(path, "kind"));
  if (kind == "strided") {
    check_keys(j, path, {"kind", "stride_bytes", "footprint_bytes", "base"});
    StridedPattern p;
    p.footprint_bytes = parse_u64(require(j, "footprint_bytes", path), child(path, "footprint_bytes"));
    opt(j, "stride_bytes", path, p.stride_bytes, parse_u64);
    opt(j, "base", path, p.base, parse_u64);
    return p;
  }
  if (kind == "uniform") {
    check_keys(j, path, {"kind", "footprint_bytes", "base"});
    UniformPattern p;
    p.footprint_bytes = parse_u64(require(j, "footprint_bytes", path), child(path, "footprint_bytes"));
    opt(j, "base", path, p.base, parse_u64);
    return p;
  }
  fail(child(path, "kind"), "expected 'strided' or 'uniform'");
}

FlowSpec parse_flow(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"id", "die", "cluster", "core", "n_groups", "compute_cycles_per_group",
                       "mem_ratio", "read_fraction", "address_pattern"});
  FlowSpec f;
  f.id = parse_u64(require(j, "id", path), child(path, "id"));
  f.die = parse_string(require(j, "die", path), child(path, "die"));
  f.cluster = parse_string(require(j, "cluster", path), child(path, "cluster"));
  opt(j, "core", path, f.core, parse_u32);
  opt(j, "n_groups", path, f.n_groups, parse_u64);
  opt(j, "compute_cycles_per_group", path, f.compute_cycles_per_group, parse_u32);
  opt(j, "mem_ratio", path, f.mem_ratio, parse_double);
  opt(j, "read_fraction", path, f.read_fraction, parse_double);
  if (const json* v = get(j, "address_pattern"))
    f.address_pattern = parse_pattern(*v, child(path, "address_pattern"));
  return f;
}

WorkloadSpec parse_workload(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"seed", "flows"});
  WorkloadSpec w;
  opt(j, "seed", path, w.seed, parse_u64);
  if (const json* v = get(j, "flows")) {
    if (!v->is_array()) fail(child(path, "flows"), "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i)
      w.flows.push_back(parse_flow((*v)[i], elem(child(path, "flows"), i)));
  }
  return w;
}

PowerSpec parse_power(const json& j, const std::string& path) {
  require_object(j, path);
  check_keys(j, path, {"window", "static_mw", "energy_pj"});
  PowerSpec p;
  opt(j, "window", path, p.window, parse_u64);
  if (const json* v = get(j, "static_mw")) {
    const std::string spath = child(path, "static_mw");
    require_object(*v, spath);
    check_keys(*v, spath, {"cluster", "dram", "mesh", "d2d"});
    opt(*v, "cluster", spath, p.static_mw.cluster, parse_double);
    opt(*v, "dram", spath, p.static_mw.dram, parse_double);
    opt(*v, "mesh", spath, p.static_mw.mesh, parse_double);
    opt(*v, "d2d", spath, p.static_mw.d2d, parse_double);
  }
  if (const json* v = get(j, "energy_pj")) {
    const std::string epath = child(path, "energy_pj");
    require_object(*v, epath);
    check_keys(*v, epath, {"l1_hit", "l2_hit", "l3_hit", "cache_miss", "flit_hop", "d2d_byte",
                           "dram_access", "core_cycle"});
    opt(*v, "l1_hit", epath, p.energy_pj.l1_hit, parse_u64);
    opt(*v, "l2_hit", epath, p.energy_pj.l2_hit, parse_u64);
    opt(*v, "l3_hit", epath, p.energy_pj.l3_hit, parse_u64);
    opt(*v, "cache_miss", epath, p.energy_pj.cache_miss, parse_u64);
    opt(*v, "flit_hop", epath, p.energy_pj.flit_hop, parse_u64);
    opt(*v, "d2d_byte", epath, p.energy_pj.d2d_byte, parse_u64);
    opt(*v, "dram_access", epath, p.energy_pj.dram_access, parse_u64);
    opt(*v, "core_cycle", epath, p.energy_pj.core_cycle, parse_u64);
  }
  return p;
}

void resolve_mesh_dims(DieSpec& die) {
  std::int32_t max_x = -1, max_y = -1;
  auto bump = [&](Coord c) {
    max_x = std::max(max_x, c.x);
    max_y = std::max(max_y, c.y);
  };
  for (const auto& c : die.clusters) bump(c.coord);
  for (const auto& c : die.home_nodes) bump(c);
  for (const auto& d : die.drams) bump(d.coord);
  for (const auto& c : die.gateways) bump(c);
  if (die.mesh_cols == 0) die.mesh_cols = static_cast<std::uint32_t>(max_x + 1);
  if (die.mesh_rows == 0) die.mesh_rows = static_cast<std::uint32_t>(max_y + 1);
}

ordered_json coord_json(Coord c) { return ordered_json::array({c.x, c.y}); }

ordered_json cache_json(const CacheSpec& c) {
  return ordered_json{{"capacity_bytes", c.capacity_bytes},
                      {"line_bytes", c.line_bytes},
                      {"associativity", c.associativity},
                      {"hit_latency_cycles", c.hit_latency_cycles}};
}

}  // namespace

SystemSpec parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError("", "syntax error on line " + std::to_string(line) + ": " + e.what());
  }
  require_object(root, "");
  check_keys(root, "", {"dies", "d2d_links", "calibration", "workload", "power"});

  SystemSpec spec;
  const json& dies = require(root, "dies", "");
  if (!dies.is_array()) fail("dies", "expected an array");
  for (std::size_t i = 0; i < dies.size(); ++i)
    spec.dies.push_back(parse_die(dies[i], elem("dies", i)));
  if (const json* v = get(root, "d2d_links")) {
    if (!v->is_array()) fail("d2d_links", "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i)
      spec.d2d_links.push_back(parse_d2d((*v)[i], elem("d2d_links", i)));
  }
  if (const json* v = get(root, "calibration"))
    spec.calibration = parse_calibration(*v, "calibration");
  if (const json* v = get(root, "workload")) spec.workload = parse_workload(*v, "workload");
  if (const json* v = get(root, "power")) spec.power = parse_power(*v, "power");

  for (auto& die : spec.dies) resolve_mesh_dims(die);
  return spec;
}

std::string serialize(const SystemSpec& spec) {
  ordered_json root;
  root["dies"] = ordered_json::array();
  for (const auto& die : spec.dies) {
    ordered_json jd;
    jd["id"] = die.id;
    jd["mesh_cols"] = die.mesh_cols;
    jd["mesh_rows"] = die.mesh_rows;
    jd["clusters"] = ordered_json::array();
    for (const auto& c : die.clusters) {
      jd["clusters"].push_back(ordered_json{{"id", c.id},
                                            {"coord", coord_json(c.coord)},
                                            {"cores", c.cores},
                                            {"clock_period", c.clock_period},
                                            {"l1i", cache_json(c.l1i)},
                                            {"l1d", cache_json(c.l1d)},
                                            {"l2", cache_json(c.l2)},
                                            {"l3", cache_json(c.l3)}});
    }
    jd["home_nodes"] = ordered_json::array();
    for (const auto& h : die.home_nodes) jd["home_nodes"].push_back(coord_json(h));
    jd["drams"] = ordered_json::array();
    for (const auto& d : die.drams) {
      jd["drams"].push_back(ordered_json{{"id", d.id},
                                         {"coord", coord_json(d.coord)},
                                         {"access_latency", d.access_latency},
                                         {"bandwidth_bytes_per_ns", d.bandwidth_bytes_per_ns},
                                         {"queue_capacity", d.queue_capacity}});
    }
    jd["gateways"] = ordered_json::array();
    for (const auto& g : die.gateways) jd["gateways"].push_back(coord_json(g));
    root["dies"].push_back(std::move(jd));
  }
  root["d2d_links"] = ordered_json::array();
  for (const auto& l : spec.d2d_links) {
    root["d2d_links"].push_back(ordered_json{
        {"id", l.id},
        {"endpoints",
         ordered_json::array({ordered_json{{"die", l.endpoints[0].die},
                                           {"gateway", coord_json(l.endpoints[0].gateway)}},
                              ordered_json{{"die", l.endpoints[1].die},
                                           {"gateway", coord_json(l.endpoints[1].gateway)}}})},
        {"bandwidth_bytes_per_ns", l.bandwidth_bytes_per_ns},
        {"adapter_latency", l.adapter_latency},
        {"flit_bytes", l.flit_bytes}});
  }
  ordered_json targets = ordered_json::object();
  for (const auto& [k, v] : spec.calibration.target_latencies_s) targets[k] = v;
  root["calibration"] = ordered_json{
      {"noc_hop_latency_cycles", spec.calibration.noc_hop_latency_cycles},
      {"noc_clock_period", spec.calibration.noc_clock_period},
      {"interleave_granularity_bytes", spec.calibration.interleave_granularity_bytes},
      {"target_latencies_s", std::move(targets)}};
  ordered_json flows = ordered_json::array();
  for (const auto& f : spec.workload.flows) {
    ordered_json pattern;
    if (const auto* s = std::get_if<StridedPattern>(&f.address_pattern)) {
      pattern = ordered_json{{"kind", "strided"},
                             {"stride_bytes", s->stride_bytes},
                             {"footprint_bytes", s->footprint_bytes},
                             {"base", s->base}};
    } else {
      const auto& u = std::get<UniformPattern>(f.address_pattern);
      pattern = ordered_json{
          {"kind", "uniform"}, {"footprint_bytes", u.footprint_bytes}, {"base", u.base}};
    }
    flows.push_back(ordered_json{{"id", f.id},
                                 {"die", f.die},
                                 {"cluster", f.cluster},
                                 {"core", f.core},
                                 {"n_groups", f.n_groups},
                                 {"compute_cycles_per_group", f.compute_cycles_per_group},
                                 {"mem_ratio", f.mem_ratio},
                                 {"read_fraction", f.read_fraction},
                                 {"address_pattern", std::move(pattern)}});
  }
  root["workload"] = ordered_json{{"seed", spec.workload.seed}, {"flows", std::move(flows)}};
  root["power"] = ordered_json{
      {"window", spec.power.window},
      {"static_mw", ordered_json{{"cluster", spec.power.static_mw.cluster},
                                 {"dram", spec.power.static_mw.dram},
                                 {"mesh", spec.power.static_mw.mesh},
                                 {"d2d", spec.power.static_mw.d2d}}},
      {"energy_pj", ordered_json{{"l1_hit", spec.power.energy_pj.l1_hit},
                                 {"l2_hit", spec.power.energy_pj.l2_hit},
                                 {"l3_hit", spec.power.energy_pj.l3_hit},
                                 {"cache_miss", spec.power.energy_pj.cache_miss},
                                 {"flit_hop", spec.power.energy_pj.flit_hop},
                                 {"d2d_byte", spec.power.energy_pj.d2d_byte},
                                 {"dram_access", spec.power.energy_pj.dram_access},
                                 {"core_cycle", spec.power.energy_pj.core_cycle}}}};
  return root.dump(2) + "\n";
}

}  // namespace csim
