#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eonsim/topology.hpp"

namespace eonsim {

/// A contiguous run of frequency slots. Slot indices are 0-based internally;
/// fixtures and logs display them 1-based.
struct SpectrumBlock {
  int start = 0;
  int size = 0;

  int end() const { return start + size; }  // one past the last slot
  /// Central frequency index, half-integer for even sizes.
  double center() const { return start + size / 2.0; }
};

constexpr std::int64_t kFreeSlot = -1;

/// Per-link frequency-slot occupancy. Single-writer value: mutation happens
/// only inside the simulator's event loop; read-only queries may be shared.
class SpectrumGrid {
 public:
  SpectrumGrid(int link_count, int slot_count);

  int slot_count() const { return slots_; }
  int link_count() const { return static_cast<int>(rows_.size()); }

  bool is_free(int link, int slot) const { return rows_[link][slot] == kFreeSlot; }
  std::int64_t occupant(int link, int slot) const { return rows_[link][slot]; }

  /// Marks the block on every path link as owned by `request`. Throws
  /// std::runtime_error on any collision, leaving the grid unchanged.
  void allocate(const RoutePath& path, const SpectrumBlock& block, std::int64_t request);

  /// Frees every slot owned by `request`. Throws on unknown ids.
  void release(std::int64_t request);

  bool has_request(std::int64_t request) const { return owned_.count(request) != 0; }
  std::int64_t occupied_cell_count() const;

  /// Debug/walkthrough snapshot: one line per link, '.' for free cells,
  /// the occupant id otherwise.
  std::string snapshot(const NetworkTopology& topo) const;
  static SpectrumGrid parse_snapshot(const NetworkTopology& topo, const std::string& text);

 private:
  int slots_;
  std::vector<std::vector<std::int64_t>> rows_;
  std::map<std::int64_t, std::vector<std::pair<int, int>>> owned_;  // id -> (link, slot)
};

/// Exhaustive list of blocks of `size` free on every link of the path
/// (continuity + contiguity), ordered by start index.
std::vector<SpectrumBlock> free_contiguous_blocks(const SpectrumGrid& grid,
                                                  const RoutePath& path, int size);

/// Number of path links where allocating the block splits one maximal free
/// run into two non-empty runs.
int count_cuts(const SpectrumGrid& grid, const RoutePath& path, const SpectrumBlock& block);

/// Signed misalignment change against the given neighbour pairs: per pair and
/// per block slot, +1 if the slot is free on the neighbour, -1 if occupied.
int misalignment_delta(const SpectrumGrid& grid,
                       const std::vector<std::pair<int, int>>& neighbor_pairs,
                       const SpectrumBlock& block);
int misalignment_delta(const SpectrumGrid& grid, const NetworkTopology& topo,
                       const RoutePath& path, const SpectrumBlock& block);

/// One live lightpath as registered by the allocator.
struct Assignment {
  std::int64_t request = 0;
  RoutePath path;
  SpectrumBlock block;
};

struct Violation {
  std::int64_t request = 0;
  std::string detail;
};

/// Checks band edges, per-link non-overlap and spectrum continuity for every
/// registered assignment against the grid. Violations are data, not errors.
std::vector<Violation> validate_assignment(const SpectrumGrid& grid,
                                           const std::vector<Assignment>& live);

}  // namespace eonsim
