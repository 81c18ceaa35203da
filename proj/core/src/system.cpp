#include "chipletsim/system.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "chipletsim/cache.hpp"
#include "chipletsim/dram.hpp"
#include "chipletsim/mesh.hpp"
#include "chipletsim/workload.hpp"

namespace csim {

namespace {

enum EventKind : int {
  kGroup = 1,      // cluster, arg = core index
  kReqInject,      // cluster, arg = txn
  kHomeArrive,     // home, arg = txn
  kHomeForward,    // home, arg unused
  kDramArrive,     // dram, arg = txn
  kDramComplete,   // dram, arg = txn
  kDatArrive,      // cluster, arg = txn
  kD2DCross,       // link, arg = txn
  kGwLand,         // die fabric, arg = txn
};

}  // namespace

struct SystemInstance::Detail {
  struct CoreState {
    std::vector<std::size_t> flow_queue;  // indices into spec.workload.flows
    std::size_t flow_pos = 0;
    std::vector<GroupAccess> stream;
    std::size_t group_idx = 0;
    SimTime flow_start = 0;
  };

  struct ClusterCtx : Component {
    Detail* d = nullptr;
    std::uint32_t die_idx = 0;
    const ClusterSpec* cspec = nullptr;
    Coord coord;
    std::unique_ptr<CacheHierarchy> hierarchy;
    std::vector<CoreState> cores;
    ComponentId kid = 0;
    std::uint32_t power = 0;
    void on_event(const Event& e) override { d->cluster_event(*this, e); }
  };

  struct HomeCtx : Component {
    Detail* d = nullptr;
    std::uint32_t die_idx = 0;
    Coord coord;
    std::string name;
    std::deque<std::uint64_t> queue;
    bool active = false;  // a forward is scheduled or the head waits on DRAM
    ComponentId kid = 0;
    void on_event(const Event& e) override { d->home_event(*this, e); }
  };

  struct DramCtx : Component {
    Detail* d = nullptr;
    std::uint32_t die_idx = 0;
    Coord coord;
    std::unique_ptr<DramModule> module;
    std::deque<HomeCtx*> blocked_homes;
    ComponentId kid = 0;
    std::uint32_t power = 0;
    void on_event(const Event& e) override { d->dram_event(*this, e); }
  };

  // Per-die context; as a component it handles messages landing on this
  // die's gateway after a D2D crossing.
  struct DieCtx : Component {
    Detail* d = nullptr;
    std::uint32_t die_idx = 0;
    const DieSpec* dspec = nullptr;
    std::unique_ptr<MeshFabric> fabric;
    std::vector<ClusterCtx*> clusters;
    std::vector<HomeCtx*> homes;
    std::vector<DramCtx*> drams;
    ComponentId kid = 0;
    std::uint32_t power = 0;
    void on_event(const Event& e) override { d->gateway_event(*this, e); }
  };

  struct LinkCtx : Component {
    Detail* d = nullptr;
    std::unique_ptr<D2DLink> link;
    std::uint32_t die_a = 0, die_b = 0;
    Coord gw_a, gw_b;
    ComponentId kid = 0;
    std::uint32_t power = 0;
    void on_event(const Event& e) override { d->d2d_event(*this, e); }
  };

  SystemSpec spec;
  Kernel kernel;
  EnergyAccountant acct{PowerSpec{}};
  std::deque<DieCtx> dies;
  std::deque<ClusterCtx> clusters;
  std::deque<HomeCtx> homes;
  std::deque<DramCtx> drams;
  std::deque<LinkCtx> links;
  std::vector<MemTransaction> txns;
  std::vector<char> past_dram;  // txn id -> response phase marker
  std::vector<FlowLatencyRecord> records;
  RunCounters counters;
  std::vector<TraceEntry> trace;

  SimTime noc_cycle() const { return spec.calibration.noc_clock_period; }

  // ---- topology helpers ----------------------------------------------------

  std::uint32_t die_of_address(std::uint64_t addr) const {
    const std::size_t idx = die_index_of_addr(addr);
    if (idx >= dies.size())
      throw std::logic_error("address beyond the last die's span: " + std::to_string(addr));
    return static_cast<std::uint32_t>(idx);
  }

  HomeCtx* home_for(std::uint32_t die_idx, std::uint64_t addr) {
    DieCtx& die = dies[die_idx];
    if (die.homes.empty()) throw std::logic_error("die has no home node");
    return die.homes[interleave_index(addr, spec.calibration.interleave_granularity_bytes,
                                      die.homes.size())];
  }

  DramCtx* dram_for(std::uint32_t die_idx, std::uint64_t addr) {
    DieCtx& die = dies[die_idx];
    if (die.drams.empty()) throw std::logic_error("die has no DRAM module");
    return die.drams[interleave_index(addr, spec.calibration.interleave_granularity_bytes,
                                      die.drams.size())];
  }

  // First declared link joining the two dies.
  std::pair<LinkCtx*, int> link_between(std::uint32_t from, std::uint32_t to) {
    for (auto& l : links) {
      if (l.die_a == from && l.die_b == to) return {&l, 0};
      if (l.die_b == from && l.die_a == to) return {&l, 1};
    }
    throw std::logic_error("no D2D link between die " + std::to_string(from) + " and die " +
                           std::to_string(to));
  }

  // ---- message legs ----------------------------------------------------------

  bool response_phase(const MemTransaction& t) const { return past_dram[t.id] != 0; }

  std::uint32_t wire_bytes(const MemTransaction& t, bool response) const {
    const MsgClass cls =
        response ? MsgClass::DatRsp : (t.is_writeback ? MsgClass::Wb : MsgClass::Req);
    return message_bytes(cls, t.bytes);
  }

  void mesh_send(std::uint32_t die_idx, std::uint32_t bytes, Coord src, Coord dst, SimTime depart,
                 ComponentId target, int kind, std::uint64_t txn) {
    DieCtx& die = dies[die_idx];
    const MeshFabric::Transfer tr = die.fabric->transfer(bytes, src, dst, depart);
    ++counters.messages_injected;
    acct.record(die.power, EnergyClass::FlitHop, std::uint64_t{tr.flits} * tr.hops, depart);
    kernel.schedule(tr.arrival, target, kind, txn);
  }

  void d2d_send(LinkCtx& l, std::uint32_t from_die, std::uint32_t bytes, SimTime depart,
                std::uint64_t txn) {
    const int dir = l.die_a == from_die ? 0 : 1;
    const SimTime arrival = l.link->transfer(dir, bytes, depart);
    ++counters.messages_injected;
    acct.record(l.power, EnergyClass::D2DByte, bytes, depart);
    const std::uint32_t other = dir == 0 ? l.die_b : l.die_a;
    kernel.schedule(arrival, dies[other].kid, kGwLand, txn);
  }

  // Request or write-back travelling from its current position toward the
  // owning die's home node, crossing the D2D link if the home is remote.
  void send_toward_home(std::uint32_t cur_die, Coord from, SimTime now, MemTransaction& t) {
    const std::uint32_t tgt_die = die_of_address(t.addr);
    const std::uint32_t bytes = wire_bytes(t, false);
    if (tgt_die == cur_die) {
      HomeCtx* home = home_for(tgt_die, t.addr);
      mesh_send(cur_die, bytes, from, home->coord, now, home->kid, kHomeArrive, t.id);
    } else {
      auto [link, dir] = link_between(cur_die, tgt_die);
      const Coord gw = dir == 0 ? link->gw_a : link->gw_b;
      mesh_send(cur_die, bytes, from, gw, now, link->kid, kD2DCross, t.id);
    }
  }

  // Response retracing toward the origin cluster.
  void send_toward_origin(std::uint32_t cur_die, Coord from, SimTime now, MemTransaction& t) {
    const std::uint32_t bytes = wire_bytes(t, true);
    ClusterCtx& origin = origin_cluster(t);
    if (t.origin_die == cur_die) {
      mesh_send(cur_die, bytes, from, origin.coord, now, origin.kid, kDatArrive, t.id);
    } else {
      auto [link, dir] = link_between(cur_die, t.origin_die);
      const Coord gw = dir == 0 ? link->gw_a : link->gw_b;
      mesh_send(cur_die, bytes, from, gw, now, link->kid, kD2DCross, t.id);
    }
  }

  ClusterCtx& origin_cluster(const MemTransaction& t) {
    for (ClusterCtx* cl : dies[t.origin_die].clusters)
      if (cl->cspec->id == t.origin_cluster) return *cl;
    throw std::logic_error("origin cluster not found");
  }

  MemTransaction& new_txn(const ClusterCtx& cl, std::uint32_t core, std::uint64_t addr,
                          bool is_read, bool is_writeback, SimTime now) {
    MemTransaction t;
    t.id = txns.size();
    t.origin_die = cl.die_idx;
    t.origin_cluster = cl.cspec->id;
    t.origin_core = core;
    t.addr = addr;
    t.is_read = is_read;
    t.is_writeback = is_writeback;
    t.bytes = cl.hierarchy->line_bytes();
    t.issue_time = now;
    t.path_log.push_back(cl.cspec->id + "#" + std::to_string(core));
    txns.push_back(std::move(t));
    past_dram.push_back(0);
    ++counters.transactions_issued;
    return txns.back();
  }

  // ---- event handlers --------------------------------------------------------

  void cluster_event(ClusterCtx& cl, const Event& e) {
    switch (e.kind) {
      case kGroup:
        run_groups(cl, static_cast<std::uint32_t>(e.arg), kernel.now());
        return;
      case kReqInject:
        send_toward_home(cl.die_idx, cl.coord, kernel.now(), txns[e.arg]);
        return;
      case kDatArrive: {
        ++counters.messages_delivered;
        MemTransaction& t = txns[e.arg];
        if (t.completed) throw std::logic_error("duplicate response for transaction");
        t.completed = true;
        t.completion_time = kernel.now();
        ++counters.transactions_completed;
        t.path_log.push_back(t.origin_cluster + "#" + std::to_string(t.origin_core));
        run_groups(cl, t.origin_core, kernel.now());
        return;
      }
      default:
        throw std::logic_error("unexpected cluster event");
    }
  }

  void run_groups(ClusterCtx& cl, std::uint32_t core, SimTime now) {
    CoreState& cs = cl.cores[core];
    for (;;) {
      if (cs.flow_pos >= cs.flow_queue.size()) return;
      const FlowSpec& flow = spec.workload.flows[cs.flow_queue[cs.flow_pos]];
      if (cs.group_idx >= cs.stream.size()) {
        records.push_back(FlowLatencyRecord{flow.id, cs.flow_start, now});
        ++cs.flow_pos;
        if (cs.flow_pos >= cs.flow_queue.size()) return;
        const FlowSpec& next = spec.workload.flows[cs.flow_queue[cs.flow_pos]];
        cs.stream = gen_access_stream(next, spec.workload.seed, cl.hierarchy->line_bytes());
        cs.group_idx = 0;
        cs.flow_start = now;
        continue;
      }

      const GroupAccess& group = cs.stream[cs.group_idx];
      ++cs.group_idx;
      ++counters.groups_executed;
      const SimTime compute = SimTime{flow.compute_cycles_per_group} * cl.cspec->clock_period;
      acct.record(cl.power, EnergyClass::CoreCycle, flow.compute_cycles_per_group, now);

      if (!group.access) {
        kernel.schedule(now + compute, cl.kid, kGroup, core);
        return;
      }

      const MemAccessDesc& acc = *group.access;
      const HierarchyResult hr = cl.hierarchy->access(core, acc.addr, !acc.is_read);
      record_probe_energy(cl, hr, now);
      const SimTime ready = now + compute + hr.latency;

      if (hr.level != HitLevel::Memory) {
        spawn_writebacks(cl, core, hr.writebacks, ready);
        kernel.schedule(ready, cl.kid, kGroup, core);
        return;
      }

      MemTransaction& t = new_txn(cl, core, acc.addr, acc.is_read, false, now);
      kernel.schedule(ready, cl.kid, kReqInject, t.id);
      spawn_writebacks(cl, core, hr.writebacks, ready);
      return;  // core blocks until the DAT response
    }
  }

  void spawn_writebacks(ClusterCtx& cl, std::uint32_t core,
                        const std::vector<std::uint64_t>& victims, SimTime at) {
    for (std::uint64_t line : victims) {
      MemTransaction& wb = new_txn(cl, core, line, false, true, at);
      kernel.schedule(at, cl.kid, kReqInject, wb.id);
    }
  }

  void record_probe_energy(ClusterCtx& cl, const HierarchyResult& hr, SimTime now) {
    const int missed = hr.level == HitLevel::Memory ? 3 : static_cast<int>(hr.level) - 1;
    if (missed > 0)
      acct.record(cl.power, EnergyClass::CacheMiss, static_cast<std::uint64_t>(missed), now);
    switch (hr.level) {
      case HitLevel::L1: acct.record(cl.power, EnergyClass::L1Hit, 1, now); break;
      case HitLevel::L2: acct.record(cl.power, EnergyClass::L2Hit, 1, now); break;
      case HitLevel::L3: acct.record(cl.power, EnergyClass::L3Hit, 1, now); break;
      case HitLevel::Memory: break;
    }
  }

  void home_event(HomeCtx& home, const Event& e) {
    switch (e.kind) {
      case kHomeArrive: {
        ++counters.messages_delivered;
        MemTransaction& t = txns[e.arg];
        t.path_log.push_back(home.name);
        home.queue.push_back(e.arg);
        if (!home.active) {
          home.active = true;
          kernel.schedule(kernel.now() + noc_cycle(), home.kid, kHomeForward, 0);
        }
        return;
      }
      case kHomeForward: {
        if (home.queue.empty()) throw std::logic_error("home forward with empty queue");
        MemTransaction& t = txns[home.queue.front()];
        DramCtx* dram = dram_for(home.die_idx, t.addr);
        if (!dram->module->can_accept()) {
          dram->blocked_homes.push_back(&home);
          return;  // head-of-line stall until the module frees a slot
        }
        dram->module->claim_slot();
        mesh_send(home.die_idx, wire_bytes(t, false), home.coord, dram->coord, kernel.now(),
                  dram->kid, kDramArrive, t.id);
        home.queue.pop_front();
        if (home.queue.empty()) {
          home.active = false;
        } else {
          kernel.schedule(kernel.now() + noc_cycle(), home.kid, kHomeForward, 0);
        }
        return;
      }
      default:
        throw std::logic_error("unexpected home event");
    }
  }

  void dram_event(DramCtx& dram, const Event& e) {
    switch (e.kind) {
      case kDramArrive: {
        ++counters.messages_delivered;
        MemTransaction& t = txns[e.arg];
        t.path_log.push_back(dram.module->spec().id);
        acct.record(dram.power, EnergyClass::DramAccess, 1, kernel.now());
        ++counters.dram_accesses;
        const SimTime done = dram.module->enqueue(kernel.now(), t.bytes);
        kernel.schedule(done, dram.kid, kDramComplete, t.id);
        return;
      }
      case kDramComplete: {
        dram.module->complete();
        if (!dram.blocked_homes.empty()) {
          HomeCtx* blocked = dram.blocked_homes.front();
          dram.blocked_homes.pop_front();
          kernel.schedule(kernel.now(), blocked->kid, kHomeForward, 0);
        }
        MemTransaction& t = txns[e.arg];
        past_dram[t.id] = 1;
        if (t.is_writeback) {
          t.completed = true;
          t.completion_time = kernel.now();
          ++counters.transactions_completed;
          return;
        }
        send_toward_origin(dram.die_idx, dram.coord, kernel.now(), t);
        return;
      }
      default:
        throw std::logic_error("unexpected dram event");
    }
  }

  void d2d_event(LinkCtx& link, const Event& e) {
    if (e.kind != kD2DCross) throw std::logic_error("unexpected link event");
    ++counters.messages_delivered;
    MemTransaction& t = txns[e.arg];
    t.path_log.push_back(link.link->spec().id);
    const bool response = response_phase(t);
    const std::uint32_t from_die = response ? die_of_address(t.addr) : t.origin_die;
    d2d_send(link, from_die, wire_bytes(t, response), kernel.now(), t.id);
  }

  void gateway_event(DieCtx& die, const Event& e) {
    if (e.kind != kGwLand) throw std::logic_error("unexpected gateway event");
    ++counters.messages_delivered;
    MemTransaction& t = txns[e.arg];
    t.path_log.push_back(die.dspec->id + ".gw");
    const bool response = response_phase(t);
    const std::uint32_t other = response ? die_of_address(t.addr) : t.origin_die;
    auto [link, dir] = link_between(other, die.die_idx);
    const Coord gw = dir == 0 ? link->gw_b : link->gw_a;
    if (response) {
      send_toward_origin(die.die_idx, gw, kernel.now(), t);
    } else {
      send_toward_home(die.die_idx, gw, kernel.now(), t);
    }
  }

  // ---- construction ----------------------------------------------------------

  void build(const SystemSpec& s) {
    spec = s;
    acct = EnergyAccountant(spec.power);

    for (std::size_t di = 0; di < spec.dies.size(); ++di) {
      const DieSpec& ds = spec.dies[di];
      dies.emplace_back();
      DieCtx& die = dies.back();
      die.d = this;
      die.die_idx = static_cast<std::uint32_t>(di);
      die.dspec = &spec.dies[di];
      die.fabric = std::make_unique<MeshFabric>(MeshDims{ds.mesh_cols, ds.mesh_rows},
                                                spec.calibration.noc_hop_latency_cycles,
                                                spec.calibration.noc_clock_period);
      die.kid = kernel.add_component(&die);
      die.power = acct.add_component(ds.id + ".mesh", PowerClass::Mesh);

      for (const ClusterSpec& cs : ds.clusters) {
        clusters.emplace_back();
        ClusterCtx& cl = clusters.back();
        cl.d = this;
        cl.die_idx = die.die_idx;
        cl.cspec = &cs;
        cl.coord = cs.coord;
        cl.hierarchy = std::make_unique<CacheHierarchy>(cs);
        cl.cores.resize(cs.cores);
        cl.kid = kernel.add_component(&cl);
        cl.power = acct.add_component(cs.id, PowerClass::Cluster);
        die.clusters.push_back(&cl);
      }
      for (std::size_t hi = 0; hi < ds.home_nodes.size(); ++hi) {
        homes.emplace_back();
        HomeCtx& h = homes.back();
        h.d = this;
        h.die_idx = die.die_idx;
        h.coord = ds.home_nodes[hi];
        h.name = ds.id + ".home" + std::to_string(hi);
        h.kid = kernel.add_component(&h);
        die.homes.push_back(&h);
      }
      for (const DramSpec& ms : ds.drams) {
        drams.emplace_back();
        DramCtx& m = drams.back();
        m.d = this;
        m.die_idx = die.die_idx;
        m.coord = ms.coord;
        m.module = std::make_unique<DramModule>(ms);
        m.kid = kernel.add_component(&m);
        m.power = acct.add_component(ms.id, PowerClass::Dram);
        die.drams.push_back(&m);
      }
    }

    for (const D2DLinkSpec& ls : spec.d2d_links) {
      links.emplace_back();
      LinkCtx& l = links.back();
      l.d = this;
      l.link = std::make_unique<D2DLink>(ls);
      const DieSpec* da = spec.find_die(ls.endpoints[0].die);
      const DieSpec* db = spec.find_die(ls.endpoints[1].die);
      l.die_a = static_cast<std::uint32_t>(da - spec.dies.data());
      l.die_b = static_cast<std::uint32_t>(db - spec.dies.data());
      l.gw_a = ls.endpoints[0].gateway;
      l.gw_b = ls.endpoints[1].gateway;
      l.kid = kernel.add_component(&l);
      l.power = acct.add_component(ls.id, PowerClass::D2D);
    }

    // Seed the workload: flows queue per core in declaration order.
    for (std::size_t fi = 0; fi < spec.workload.flows.size(); ++fi) {
      const FlowSpec& f = spec.workload.flows[fi];
      for (ClusterCtx& cl : clusters) {
        if (cl.cspec->id == f.cluster && spec.dies[cl.die_idx].id == f.die) {
          cl.cores[f.core].flow_queue.push_back(fi);
          break;
        }
      }
    }
    for (ClusterCtx& cl : clusters) {
      for (std::uint32_t core = 0; core < cl.cores.size(); ++core) {
        CoreState& cs = cl.cores[core];
        if (cs.flow_queue.empty()) continue;
        const FlowSpec& first = spec.workload.flows[cs.flow_queue[0]];
        cs.stream = gen_access_stream(first, spec.workload.seed, cl.hierarchy->line_bytes());
        kernel.schedule(0, cl.kid, kGroup, core);
      }
    }
  }
};

SystemInstance::SystemInstance() : d_(std::make_unique<Detail>()) {}
SystemInstance::~SystemInstance() = default;

RunReport SystemInstance::run(std::optional<SimTime> until) {
  RunReport report;
  report.stats = until ? d_->kernel.run_until(*until) : d_->kernel.run();
  report.final_clock = report.stats.final_clock;
  report.flows = d_->records;
  report.power = power_series(d_->acct, report.final_clock);
  report.counters = d_->counters;
  report.total_energy_pj = d_->acct.total_pj();
  return report;
}

const SystemSpec& SystemInstance::spec() const { return d_->spec; }
const std::vector<MemTransaction>& SystemInstance::transactions() const { return d_->txns; }
const EnergyAccountant& SystemInstance::energy() const { return d_->acct; }

void SystemInstance::enable_trace() { d_->kernel.record_trace(&d_->trace); }
const std::vector<TraceEntry>& SystemInstance::trace() const { return d_->trace; }

SystemInstance::Shape SystemInstance::shape() const {
  return Shape{d_->clusters.size(), d_->drams.size(), d_->dies.size(), d_->links.size(),
               d_->homes.size()};
}

std::unique_ptr<SystemInstance> build_system(const SystemSpec& spec) {
  const std::vector<Diagnostic> diags = validate(spec);
  if (!diags.empty()) {
    throw std::invalid_argument("invalid system spec: [" + diags.front().code + "] " +
                                diags.front().path + ": " + diags.front().message);
  }
  std::unique_ptr<SystemInstance> inst(new SystemInstance());
  inst->d_->build(spec);
  return inst;
}

}  // namespace csim
