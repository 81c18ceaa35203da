#pragma once

#include <cstddef>
#include <cstdint>
#include <queue>
#include <vector>

namespace csim {

// Simulation time in integer picoseconds. 64 bits cover ~213 days of
// simulated time, far beyond any run this tool performs.
using SimTime = std::uint64_t;

constexpr SimTime kTicksPerNs = 1000;

constexpr SimTime ns_to_ticks(std::uint64_t v) { return v * kTicksPerNs; }
constexpr double ticks_to_seconds(SimTime t) { return static_cast<double>(t) * 1e-12; }
constexpr double ticks_to_ns(SimTime t) { return static_cast<double>(t) * 1e-3; }

using ComponentId = std::uint32_t;

struct Event {
  SimTime time = 0;
  std::uint64_t seq = 0;   // kernel-assigned insertion counter
  ComponentId target = 0;
  int kind = 0;            // component-defined
  std::uint64_t arg = 0;   // component-defined payload, usually a transaction index
};

// Pending events ordered lexicographically on (time, seq). seq uniqueness
// makes the pop order total, so equal-time events come out in scheduling
// order.
class EventQueue {
 public:
  void push(const Event& e) { heap_.push(e); }
  Event pop();
  const Event& top() const { return heap_.top(); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  SimTime last_popped_ = 0;
};

struct RunStats {
  std::uint64_t events_processed = 0;
  SimTime final_clock = 0;
  bool operator==(const RunStats&) const = default;
};

struct TraceEntry {
  SimTime time = 0;
  std::uint64_t seq = 0;
  ComponentId target = 0;
  bool operator==(const TraceEntry&) const = default;
};

class Component {
 public:
  virtual ~Component() = default;
  virtual void on_event(const Event& e) = 0;
};

// Single-threaded deterministic event kernel. One kernel instance and the
// components registered with it belong to one simulation; independent
// instances may run concurrently.
class Kernel {
 public:
  // Components are owned by the caller and must outlive the kernel.
  ComponentId add_component(Component* c);

  // Scheduling into the past is a programming bug and aborts the run.
  void schedule(SimTime t, ComponentId target, int kind, std::uint64_t arg = 0);

  SimTime now() const { return clock_; }

  // Processes every event with time <= limit in (time, seq) order, then
  // leaves the clock at limit even if the queue drained early.
  RunStats run_until(SimTime limit);

  // Drains the queue entirely; the clock ends at the last event's time.
  RunStats run();

  // Optional (time, seq, target) trace sink, used by determinism checks.
  void record_trace(std::vector<TraceEntry>* sink) { trace_ = sink; }

  std::size_t pending_events() const { return queue_.size(); }

 private:
  RunStats drain(bool bounded, SimTime limit);

  EventQueue queue_;
  std::vector<Component*> components_;
  SimTime clock_ = 0;
  std::uint64_t next_seq_ = 0;
  std::vector<TraceEntry>* trace_ = nullptr;
};

}  // namespace csim
