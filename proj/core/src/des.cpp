#include "chipletsim/des.hpp"

#include <stdexcept>
#include <string>

namespace csim {

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  if (e.time < last_popped_) {
    throw std::logic_error("event queue yielded time " + std::to_string(e.time) +
                           " before " + std::to_string(last_popped_));
  }
  last_popped_ = e.time;
  return e;
}

ComponentId Kernel::add_component(Component* c) {
  components_.push_back(c);
  return static_cast<ComponentId>(components_.size() - 1);
}

void Kernel::schedule(SimTime t, ComponentId target, int kind, std::uint64_t arg) {
  if (t < clock_) {
    throw std::logic_error("schedule into the past: t=" + std::to_string(t) +
                           " clock=" + std::to_string(clock_));
  }
  if (target >= components_.size()) {
    throw std::logic_error("schedule to unknown component " + std::to_string(target));
  }
  queue_.push(Event{t, next_seq_++, target, kind, arg});
}

RunStats Kernel::drain(bool bounded, SimTime limit) {
  std::uint64_t processed = 0;
  while (!queue_.empty() && (!bounded || queue_.top().time <= limit)) {
    Event e = queue_.pop();
    clock_ = e.time;
    if (trace_) trace_->push_back(TraceEntry{e.time, e.seq, e.target});
    components_[e.target]->on_event(e);
    ++processed;
  }
  if (bounded && limit > clock_) clock_ = limit;
  return RunStats{processed, clock_};
}

RunStats Kernel::run_until(SimTime limit) { return drain(true, limit); }

RunStats Kernel::run() { return drain(false, 0); }

}  // namespace csim
