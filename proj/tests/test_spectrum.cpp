#include <random>
#include <set>

#include "doctest.h"
#include "eonsim/spectrum.hpp"
#include "helpers.hpp"

using namespace eonsim;
using eonsim::test::load_fig1;
using eonsim::test::load_fig1_grid;
using eonsim::test::random_grid;
using eonsim::test::random_topology;
using eonsim::test::route_by_nodes;

namespace {

// Naive per-link fragment counter used as the cuts oracle.
int free_fragments(const SpectrumGrid& grid, int link) {
  int runs = 0;
  bool in_run = false;
  for (int s = 0; s < grid.slot_count(); ++s) {
    if (grid.is_free(link, s)) {
      if (!in_run) ++runs;
      in_run = true;
    } else {
      in_run = false;
    }
  }
  return runs;
}

// Misaligned-slot count between two links restricted to the block's slots:
// slots occupied on exactly one of the two.
int misaligned_slots(const SpectrumGrid& grid, int la, int lb, const SpectrumBlock& block) {
  int count = 0;
  for (int s = block.start; s < block.end(); ++s)
    if (grid.is_free(la, s) != grid.is_free(lb, s)) ++count;
  return count;
}

}  // namespace

TEST_CASE("fig1 worked example: candidate blocks") {
  auto topo = load_fig1();
  auto grid = load_fig1_grid(topo);
  auto acef = route_by_nodes(topo, {"A", "C", "E", "F"});
  auto abdf = route_by_nodes(topo, {"A", "B", "D", "F"});

  auto blocks1 = free_contiguous_blocks(grid, acef, 2);
  REQUIRE(blocks1.size() == 2);
  CHECK(blocks1[0].start == 7);  // slots {8,9} 1-based
  CHECK(blocks1[1].start == 8);  // slots {9,10}

  auto blocks2 = free_contiguous_blocks(grid, abdf, 2);
  REQUIRE(blocks2.size() == 1);
  CHECK(blocks2[0].start == 4);  // slots {5,6}
}

TEST_CASE("fig1 worked example: cuts") {
  auto topo = load_fig1();
  auto grid = load_fig1_grid(topo);
  auto acef = route_by_nodes(topo, {"A", "C", "E", "F"});
  auto abdf = route_by_nodes(topo, {"A", "B", "D", "F"});
  CHECK(count_cuts(grid, acef, {7, 2}) == 2);
  CHECK(count_cuts(grid, acef, {8, 2}) == 0);
  CHECK(count_cuts(grid, abdf, {4, 2}) == 1);
}

TEST_CASE("fig1 worked example: misalignment deltas") {
  auto topo = load_fig1();
  auto grid = load_fig1_grid(topo);
  auto acef = route_by_nodes(topo, {"A", "C", "E", "F"});
  auto abdf = route_by_nodes(topo, {"A", "B", "D", "F"});
  CHECK(misalignment_delta(grid, topo, acef, {7, 2}) == 6);
  CHECK(misalignment_delta(grid, topo, acef, {8, 2}) == 8);
  CHECK(misalignment_delta(grid, topo, abdf, {4, 2}) == -6);
}

TEST_CASE("empty grid has N_FS - n + 1 blocks") {
  auto topo = load_fig1();
  SpectrumGrid grid(topo.link_count(), 10);
  auto path = route_by_nodes(topo, {"A", "C", "E", "F"});
  for (int n : {1, 2, 5, 10})
    CHECK(static_cast<int>(free_contiguous_blocks(grid, path, n).size()) == 10 - n + 1);
  CHECK(free_contiguous_blocks(grid, path, 11).empty());
}

TEST_CASE("free blocks equal the brute-force scan on random grids") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto topo = random_topology(rng, 6);
    std::uniform_int_distribution<int> slot_count(4, 16);
    const int n_fs = slot_count(rng);
    auto grid = random_grid(rng, topo, n_fs, 0.35);
    auto paths = k_shortest_paths(topo, 0, topo.node_count() - 1, 2);
    std::uniform_int_distribution<int> size_pick(1, 4);
    const int size = size_pick(rng);
    for (const auto& path : paths) {
      std::set<int> starts;
      for (int s = 0; s + size <= n_fs; ++s) {
        bool ok = true;
        for (int li : path.links)
          for (int q = s; q < s + size; ++q)
            if (!grid.is_free(li, q)) ok = false;
        if (ok) starts.insert(s);
      }
      std::set<int> got;
      for (const auto& b : free_contiguous_blocks(grid, path, size)) {
        CHECK(b.size == size);
        got.insert(b.start);
      }
      CHECK(got == starts);
    }
  }
}

TEST_CASE("cuts and misalignment agree with the recompute-from-scratch oracle") {
  std::mt19937_64 rng(23);
  std::int64_t alloc_id = 1;
  for (int trial = 0; trial < 40; ++trial) {
    auto topo = random_topology(rng, 6);
    auto grid = random_grid(rng, topo, 12, 0.3);
    auto paths = k_shortest_paths(topo, 0, topo.node_count() - 1, 2);
    for (const auto& path : paths) {
      auto blocks = free_contiguous_blocks(grid, path, 2);
      if (blocks.empty()) continue;
      const auto block = blocks[blocks.size() / 2];
      const auto pairs = neighbor_links(topo, path);

      // predicted values
      const int predicted_cuts = count_cuts(grid, path, block);
      const int predicted_mis = misalignment_delta(grid, pairs, block);

      // oracle: allocate, recount, release
      std::vector<int> frags_before, mis_before;
      for (int li : path.links) frags_before.push_back(free_fragments(grid, li));
      for (const auto& [pl, nb] : pairs) mis_before.push_back(misaligned_slots(grid, pl, nb, block));
      SpectrumGrid after = grid;
      after.allocate(path, block, alloc_id++);
      int cuts_oracle = 0;
      for (size_t i = 0; i < path.links.size(); ++i) {
        const int delta = free_fragments(after, path.links[i]) - frags_before[i];
        if (delta == 1) ++cuts_oracle;
      }
      int mis_oracle = 0;
      for (size_t i = 0; i < pairs.size(); ++i)
        mis_oracle += misaligned_slots(after, pairs[i].first, pairs[i].second, block) -
                      mis_before[i];
      CHECK(predicted_cuts == cuts_oracle);
      CHECK(predicted_mis == mis_oracle);
      // bound from the slot algebra
      CHECK(std::abs(predicted_mis) <= block.size * static_cast<int>(pairs.size()));
    }
  }
}

TEST_CASE("allocate/release are inverse; collisions and unknown ids are errors") {
  auto topo = load_fig1();
  auto grid = load_fig1_grid(topo);
  const std::string before = grid.snapshot(topo);
  auto abdf = route_by_nodes(topo, {"A", "B", "D", "F"});

  grid.allocate(abdf, {4, 2}, 7);
  CHECK_THROWS(grid.allocate(abdf, {4, 2}, 8));  // double allocate
  grid.release(7);
  CHECK(grid.snapshot(topo) == before);
  CHECK_THROWS(grid.release(7));  // unknown id
}

TEST_CASE("allocating on ABDF leaves the ACEF candidate set unchanged") {
  auto topo = load_fig1();
  auto grid = load_fig1_grid(topo);
  auto acef = route_by_nodes(topo, {"A", "C", "E", "F"});
  auto abdf = route_by_nodes(topo, {"A", "B", "D", "F"});
  auto before = free_contiguous_blocks(grid, acef, 2);
  grid.allocate(abdf, {4, 2}, 7);
  auto after = free_contiguous_blocks(grid, acef, 2);
  REQUIRE(before.size() == after.size());
  for (size_t i = 0; i < before.size(); ++i) CHECK(before[i].start == after[i].start);
}

TEST_CASE("validate_assignment flags the three constraint families") {
  auto topo = load_fig1();

  SUBCASE("edge-aligned block satisfies the band constraints") {
    SpectrumGrid grid(topo.link_count(), 10);
    auto path = route_by_nodes(topo, {"A", "B"});
    grid.allocate(path, {0, 2}, 1);
    std::vector<Assignment> live{{1, path, {0, 2}}};
    CHECK(validate_assignment(grid, live).empty());
  }

  SUBCASE("overlap on a shared link is reported") {
    SpectrumGrid grid(topo.link_count(), 10);
    auto path = route_by_nodes(topo, {"A", "B"});
    // forge the overlapping state directly in the assignment list
    grid.allocate(path, {2, 2}, 1);  // slots {3,4}
    std::vector<Assignment> live{{1, path, {2, 2}}, {2, path, {3, 2}}};
    auto violations = validate_assignment(grid, live);
    CHECK(violations.size() >= 1);
  }

  SUBCASE("continuity violation is reported") {
    SpectrumGrid grid(topo.link_count(), 10);
    auto path = route_by_nodes(topo, {"A", "B", "D"});
    // occupy different slots on the two links of the path
    auto l1 = route_by_nodes(topo, {"A", "B"});
    auto l2 = route_by_nodes(topo, {"B", "D"});
    grid.allocate(l1, {1, 2}, 1);
    grid.allocate(l2, {3, 2}, 2);
    std::vector<Assignment> live{{1, path, {1, 2}}};
    auto violations = validate_assignment(grid, live);
    CHECK(!violations.empty());
  }
}

TEST_CASE("grids built only by allocate/release always validate clean") {
  std::mt19937_64 rng(5);
  auto topo = load_fig1();
  SpectrumGrid grid(topo.link_count(), 12);
  std::vector<Assignment> live;
  std::int64_t next_id = 1;
  std::uniform_int_distribution<int> node_pick(0, topo.node_count() - 1);
  std::uniform_int_distribution<int> size_pick(1, 3);
  for (int step = 0; step < 300; ++step) {
    const bool depart = !live.empty() && (rng() % 3 == 0);
    if (depart) {
      std::uniform_int_distribution<size_t> pick(0, live.size() - 1);
      const size_t idx = pick(rng);
      grid.release(live[idx].request);
      live.erase(live.begin() + idx);
    } else {
      int src = node_pick(rng), dst = node_pick(rng);
      if (src == dst) continue;
      auto paths = k_shortest_paths(topo, src, dst, 2);
      const auto& path = paths[rng() % paths.size()];
      auto blocks = free_contiguous_blocks(grid, path, size_pick(rng));
      if (blocks.empty()) continue;
      const auto block = blocks[rng() % blocks.size()];
      grid.allocate(path, block, next_id);
      live.push_back({next_id, path, block});
      ++next_id;
    }
    CHECK(validate_assignment(grid, live).empty());
  }
}

TEST_CASE("snapshot export/parse round-trip") {
  std::mt19937_64 rng(31);
  auto topo = random_topology(rng, 6);
  auto grid = random_grid(rng, topo, 9, 0.4);
  auto text = grid.snapshot(topo);
  auto parsed = SpectrumGrid::parse_snapshot(topo, text);
  CHECK(parsed.snapshot(topo) == text);
  CHECK(parsed.occupied_cell_count() == grid.occupied_cell_count());
}
