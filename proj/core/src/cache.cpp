#include "chipletsim/cache.hpp"

#include <algorithm>
#include <stdexcept>

namespace csim {

SetAssocCache::SetAssocCache(const CacheSpec& spec, SimTime clock_period)
    : line_bytes_(spec.line_bytes),
      associativity_(spec.associativity),
      n_sets_(spec.capacity_bytes / (std::uint64_t{spec.line_bytes} * spec.associativity)),
      hit_latency_(SimTime{spec.hit_latency_cycles} * clock_period) {
  if (associativity_ == 0 || (line_bytes_ & (line_bytes_ - 1)) != 0) {
    throw std::logic_error("cache geometry requires associativity >= 1 and power-of-two lines");
  }
  if (n_sets_ == 0) n_sets_ = 1;
  sets_.resize(n_sets_);
}

bool SetAssocCache::probe(std::uint64_t addr, bool is_write) {
  const std::uint64_t line = line_of(addr);
  auto& set = sets_[set_of(line)];
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i].line == line) {
      Way w = set[i];
      if (is_write) w.dirty = true;
      set.erase(set.begin() + static_cast<std::ptrdiff_t>(i));
      set.insert(set.begin(), w);
      return true;
    }
  }
  return false;
}

std::optional<std::uint64_t> SetAssocCache::install(std::uint64_t addr, bool dirty) {
  const std::uint64_t line = line_of(addr);
  auto& set = sets_[set_of(line)];
  std::optional<std::uint64_t> victim;
  if (set.size() >= associativity_) {
    const Way& lru = set.back();
    if (lru.dirty) victim = lru.line;
    set.pop_back();
  }
  set.insert(set.begin(), Way{line, dirty});
  return victim;
}

SetAssocCache::AccessResult SetAssocCache::access(std::uint64_t addr, bool is_write) {
  if (probe(addr, is_write)) return AccessResult{true, std::nullopt};
  return AccessResult{false, install(addr, is_write)};
}

CacheHierarchy::CacheHierarchy(const ClusterSpec& spec)
    : l2_(spec.l2, spec.clock_period),
      l3_(spec.l3, spec.clock_period),
      line_bytes_(spec.l1d.line_bytes) {
  l1d_.reserve(spec.cores);
  for (std::uint32_t c = 0; c < spec.cores; ++c) l1d_.emplace_back(spec.l1d, spec.clock_period);
}

HierarchyResult CacheHierarchy::access(std::uint32_t core, std::uint64_t addr, bool is_write) {
  HierarchyResult res;
  auto wb = [&](std::optional<std::uint64_t> victim) {
    if (victim) res.writebacks.push_back(*victim);
  };

  SetAssocCache& l1 = l1d_[core];
  res.latency += l1.hit_latency();
  if (l1.probe(addr, is_write)) {
    res.level = HitLevel::L1;
    return res;
  }

  res.latency += l2_.hit_latency();
  if (l2_.probe(addr, false)) {
    res.level = HitLevel::L2;
    wb(l1.install(addr, is_write));
    return res;
  }

  res.latency += l3_.hit_latency();
  if (l3_.probe(addr, false)) {
    res.level = HitLevel::L3;
    wb(l2_.install(addr, false));
    wb(l1.install(addr, is_write));
    return res;
  }

  res.level = HitLevel::Memory;
  wb(l3_.install(addr, false));
  wb(l2_.install(addr, false));
  wb(l1.install(addr, is_write));
  return res;
}

}  // namespace csim
