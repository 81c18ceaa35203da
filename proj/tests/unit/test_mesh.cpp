#include <doctest.h>

#include <cstdlib>

#include "chipletsim/mesh.hpp"
#include "oracles.hpp"

using namespace csim;

TEST_CASE("xy route basics") {
  const MeshDims dims{4, 4};
  CHECK(xy_route({0, 0}, {0, 0}, dims).size() == 1);  // identity, no hops

  const auto path = xy_route({0, 0}, {2, 1}, dims);
  REQUIRE(path.size() == 4);  // +X, +X, +Y
  CHECK(path[1] == Coord{1, 0});
  CHECK(path[2] == Coord{2, 0});
  CHECK(path[3] == Coord{2, 1});

  CHECK_THROWS_AS(xy_route({0, 0}, {4, 0}, dims), std::out_of_range);
  CHECK_THROWS_AS(xy_route({-1, 0}, {0, 0}, dims), std::out_of_range);
}

TEST_CASE("xy route length equals BFS distance on grids up to 5x5") {
  for (std::uint32_t cols = 1; cols <= 5; ++cols) {
    for (std::uint32_t rows = 1; rows <= 5; ++rows) {
      const MeshDims dims{cols, rows};
      for (std::int32_t sx = 0; sx < static_cast<std::int32_t>(cols); ++sx)
        for (std::int32_t sy = 0; sy < static_cast<std::int32_t>(rows); ++sy)
          for (std::int32_t dx = 0; dx < static_cast<std::int32_t>(cols); ++dx)
            for (std::int32_t dy = 0; dy < static_cast<std::int32_t>(rows); ++dy) {
              const auto path = xy_route({sx, sy}, {dx, dy}, dims);
              const int hops = static_cast<int>(path.size()) - 1;
              CHECK(hops == oracle::bfs_distance(static_cast<int>(cols), static_cast<int>(rows),
                                                 sx, sy, dx, dy));
              CHECK(hops == std::abs(sx - dx) + std::abs(sy - dy));
            }
    }
  }
}

TEST_CASE("message sizes follow the class formula") {
  CHECK(message_bytes(MsgClass::Req, 64) == 16);
  CHECK(message_bytes(MsgClass::DatRsp, 64) == 80);
  CHECK(message_bytes(MsgClass::Wb, 64) == 80);
  CHECK(message_bytes(MsgClass::DatRsp, 128) == 144);
}

TEST_CASE("interleave index round-robins over granularity blocks") {
  CHECK(interleave_index(0, 4096, 2) == 0);
  CHECK(interleave_index(4096, 4096, 2) == 1);
  CHECK(interleave_index(8192, 4096, 2) == 0);
  CHECK(interleave_index(12345, 4096, 1) == 0);
}

TEST_CASE("uniform addresses spread evenly over four homes") {
  std::uint64_t counts[4] = {0, 0, 0, 0};
  std::uint64_t state = 99;
  for (int i = 0; i < 1000000; ++i) {
    const std::uint64_t addr = oracle::splitmix64_step(state) % (1ull << 32);
    ++counts[interleave_index(addr, 4096, 4)];
  }
  for (auto c : counts) {
    CHECK(c > 240000);
    CHECK(c < 260000);
  }
}

TEST_CASE("uniform addresses split evenly over two modules") {
  std::uint64_t counts[2] = {0, 0};
  std::uint64_t state = 7;
  for (int i = 0; i < 1000000; ++i) {
    const std::uint64_t addr = oracle::splitmix64_step(state) % (1ull << 32);
    ++counts[interleave_index(addr, 4096, 2)];
  }
  CHECK(counts[0] > 490000);
  CHECK(counts[0] < 510000);
  CHECK(counts[0] + counts[1] == 1000000);
}

TEST_CASE("mesh transfer timing on an idle path") {
  // 80 B at 32 B/flit = 3 flits; 3 hops at 2 cycles of 1 ns; tail +2 cycles.
  MeshFabric fabric(MeshDims{4, 4}, 2, 1000);
  const auto tr = fabric.transfer(80, {0, 0}, {2, 1}, 10000);
  CHECK(tr.flits == 3);
  CHECK(tr.hops == 3);
  CHECK(tr.arrival == 10000 + 3 * 2000 + 2 * 1000);
}

TEST_CASE("local delivery costs one NoC cycle") {
  MeshFabric fabric(MeshDims{2, 2}, 2, 1000);
  CHECK(fabric.transfer(16, {1, 1}, {1, 1}, 500).arrival == 1500);
}

TEST_CASE("same-cycle link contention serializes by one cycle") {
  MeshFabric fabric(MeshDims{2, 1}, 2, 1000);
  const auto first = fabric.transfer(16, {0, 0}, {1, 0}, 0);
  const auto second = fabric.transfer(16, {0, 0}, {1, 0}, 0);
  CHECK(first.arrival == 2000);
  CHECK(second.arrival == 3000);
}

TEST_CASE("a directed link grants at most one flit per cycle") {
  MeshFabric fabric(MeshDims{2, 1}, 2, 1000);
  SimTime prev_free = 0;
  for (int i = 0; i < 20; ++i) {
    (void)fabric.transfer(96, {0, 0}, {1, 0}, 0);  // 3 flits each
    const SimTime free_at = fabric.link_next_free({0, 0}, {1, 0});
    CHECK(free_at >= prev_free + 3 * 1000);
    prev_free = free_at;
  }
}

TEST_CASE("reverse direction is independent") {
  MeshFabric fabric(MeshDims{2, 1}, 2, 1000);
  (void)fabric.transfer(16, {0, 0}, {1, 0}, 0);
  const auto back = fabric.transfer(16, {1, 0}, {0, 0}, 0);
  CHECK(back.arrival == 2000);
}

TEST_CASE("d2d transfer arithmetic") {
  D2DLinkSpec spec;
  spec.id = "link";
  spec.bandwidth_bytes_per_ns = 32.0;
  spec.adapter_latency = 10000;
  spec.flit_bytes = 64;
  D2DLink link(spec);

  SUBCASE("serialization plus adapter") {
    CHECK(link.transfer(0, 80, 0) == 12500);  // 10 ns + 80/32 ns
  }
  SUBCASE("zero-byte probe costs the adapter alone") {
    CHECK(link.transfer(0, 0, 0) == 10000);
  }
  SUBCASE("back-to-back occupancy") {
    CHECK(link.transfer(0, 80, 0) == 12500);
    CHECK(link.transfer(0, 80, 0) == 15000);  // 2.5 ns later
  }
  SUBCASE("full duplex") {
    CHECK(link.transfer(0, 80, 0) == 12500);
    CHECK(link.transfer(1, 80, 0) == 12500);
  }
}

TEST_CASE("serialization rounds up to whole ticks") {
  CHECK(serialization_ticks(64, 16.0) == 4000);
  CHECK(serialization_ticks(1, 3.0) == 334);  // 333.33.. ps
  CHECK(serialization_ticks(0, 3.0) == 0);
}
