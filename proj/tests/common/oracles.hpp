// Independent reference implementations used to cross-check the simulator.
// These deliberately share no code with the library: the cache model is a
// timestamp-scan LRU, routing distance comes from BFS over the grid graph,
// and the RNG is a separate transcription of the splitmix64 recurrence.
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <vector>

namespace oracle {

// ---- splitmix64 -------------------------------------------------------------

inline std::uint64_t splitmix64_step(std::uint64_t& state) {
  state = state + 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z = z ^ (z >> 31);
  return z;
}

inline double unit_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * (1.0 / 9007199254740992.0);  // 2^53
}

// ---- brute-force set-associative LRU cache ---------------------------------

class LruCache {
 public:
  LruCache(std::uint64_t capacity, std::uint32_t line, std::uint32_t assoc)
      : line_(line), assoc_(assoc), n_sets_(capacity / (std::uint64_t{line} * assoc)) {
    if (n_sets_ == 0) n_sets_ = 1;
    table_.resize(n_sets_);
  }

  bool lookup(std::uint64_t addr, bool mark_dirty) {
    auto& set = table_[index(addr)];
    const std::uint64_t line = align(addr);
    for (auto& e : set) {
      if (e.line == line) {
        e.stamp = ++clock_;
        if (mark_dirty) e.dirty = true;
        return true;
      }
    }
    return false;
  }

  // Returns the evicted dirty line, if the victim was dirty.
  std::optional<std::uint64_t> fill(std::uint64_t addr, bool dirty) {
    auto& set = table_[index(addr)];
    std::optional<std::uint64_t> victim;
    if (set.size() >= assoc_) {
      std::size_t lru = 0;
      for (std::size_t i = 1; i < set.size(); ++i)
        if (set[i].stamp < set[lru].stamp) lru = i;
      if (set[lru].dirty) victim = set[lru].line;
      set.erase(set.begin() + static_cast<std::ptrdiff_t>(lru));
    }
    set.push_back(Entry{align(addr), ++clock_, dirty});
    return victim;
  }

 private:
  struct Entry {
    std::uint64_t line = 0;
    std::uint64_t stamp = 0;
    bool dirty = false;
  };

  std::uint64_t align(std::uint64_t addr) const { return addr - addr % line_; }
  std::size_t index(std::uint64_t addr) const {
    return static_cast<std::size_t>((align(addr) / line_) % n_sets_);
  }

  std::uint32_t line_;
  std::uint32_t assoc_;
  std::uint64_t n_sets_;
  std::uint64_t clock_ = 0;
  std::vector<std::vector<Entry>> table_;
};

// Three-level walk with the same contract as the hierarchy under test:
// serial probes, allocate at every missed level during the walk, L1 holds
// write dirtiness, outer levels fill clean.
struct LruHierarchy {
  LruCache l1, l2, l3;

  struct Outcome {
    int level = 0;  // 1..3, 0 = memory
    std::vector<std::uint64_t> writebacks;
  };

  Outcome access(std::uint64_t addr, bool is_write) {
    Outcome out;
    auto take = [&](std::optional<std::uint64_t> v) {
      if (v) out.writebacks.push_back(*v);
    };
    if (l1.lookup(addr, is_write)) {
      out.level = 1;
      return out;
    }
    if (l2.lookup(addr, false)) {
      out.level = 2;
      take(l1.fill(addr, is_write));
      return out;
    }
    if (l3.lookup(addr, false)) {
      out.level = 3;
      take(l2.fill(addr, false));
      take(l1.fill(addr, is_write));
      return out;
    }
    out.level = 0;
    take(l3.fill(addr, false));
    take(l2.fill(addr, false));
    take(l1.fill(addr, is_write));
    return out;
  }
};

// ---- BFS shortest path on the mesh grid -------------------------------------

inline int bfs_distance(int cols, int rows, int sx, int sy, int dx, int dy) {
  std::vector<int> dist(static_cast<std::size_t>(cols) * rows, -1);
  auto at = [&](int x, int y) -> int& { return dist[static_cast<std::size_t>(y) * cols + x]; };
  std::queue<std::pair<int, int>> frontier;
  at(sx, sy) = 0;
  frontier.push({sx, sy});
  while (!frontier.empty()) {
    auto [x, y] = frontier.front();
    frontier.pop();
    if (x == dx && y == dy) return at(x, y);
    const int steps[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& s : steps) {
      const int nx = x + s[0], ny = y + s[1];
      if (nx < 0 || ny < 0 || nx >= cols || ny >= rows) continue;
      if (at(nx, ny) != -1) continue;
      at(nx, ny) = at(x, y) + 1;
      frontier.push({nx, ny});
    }
  }
  return -1;
}

// ---- FIFO single-server queue ------------------------------------------------

// completion_i = max(arrive_i, completion_{i-1}) + service_i
inline std::vector<std::uint64_t> fifo_completions(const std::vector<std::uint64_t>& arrivals,
                                                   const std::vector<std::uint64_t>& service) {
  std::vector<std::uint64_t> done;
  std::uint64_t prev = 0;
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    const std::uint64_t start = arrivals[i] > prev ? arrivals[i] : prev;
    prev = start + service[i];
    done.push_back(prev);
  }
  return done;
}

}  // namespace oracle
