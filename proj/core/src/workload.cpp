#include "chipletsim/workload.hpp"

namespace csim {

std::vector<GroupAccess> gen_access_stream(const FlowSpec& flow, std::uint64_t global_seed,
                                           std::uint32_t line_bytes) {
  Rng rng = flow_rng(global_seed, flow.id);
  std::vector<GroupAccess> stream;
  stream.reserve(flow.n_groups);
  std::uint64_t mem_index = 0;
  for (std::uint64_t g = 0; g < flow.n_groups; ++g) {
    GroupAccess entry{g, std::nullopt};
    if (rng.next_unit() < flow.mem_ratio) {
      bool is_read = rng.next_unit() < flow.read_fraction;
      std::uint64_t addr = 0;
      if (const auto* s = std::get_if<StridedPattern>(&flow.address_pattern)) {
        addr = s->base + (mem_index * s->stride_bytes) % s->footprint_bytes;
      } else {
        const auto& u = std::get<UniformPattern>(flow.address_pattern);
        std::uint64_t lines = u.footprint_bytes / line_bytes;
        addr = u.base + (rng.next() % lines) * line_bytes;
      }
      entry.access = MemAccessDesc{addr, is_read, line_bytes};
      ++mem_index;
    }
    stream.push_back(entry);
  }
  return stream;
}

}  // namespace csim
