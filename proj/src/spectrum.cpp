#include "eonsim/spectrum.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace eonsim {

SpectrumGrid::SpectrumGrid(int link_count, int slot_count) : slots_(slot_count) {
  if (link_count < 1 || slot_count < 1)
    throw std::invalid_argument("SpectrumGrid: need at least one link and one slot");
  rows_.assign(link_count, std::vector<std::int64_t>(slot_count, kFreeSlot));
}

void SpectrumGrid::allocate(const RoutePath& path, const SpectrumBlock& block,
                            std::int64_t request) {
  if (block.start < 0 || block.size < 1 || block.end() > slots_)
    throw std::runtime_error("allocate: block outside the grid");
  if (owned_.count(request)) throw std::runtime_error("allocate: request id already live");
  for (int li : path.links)
    for (int s = block.start; s < block.end(); ++s)
      if (rows_[li][s] != kFreeSlot)
        throw std::runtime_error("allocate: slot collision on link " + std::to_string(li));
  auto& cells = owned_[request];
  for (int li : path.links)
    for (int s = block.start; s < block.end(); ++s) {
      rows_[li][s] = request;
      cells.emplace_back(li, s);
    }
}

void SpectrumGrid::release(std::int64_t request) {
  auto it = owned_.find(request);
  if (it == owned_.end()) throw std::runtime_error("release: unknown request id");
  for (auto [li, s] : it->second) rows_[li][s] = kFreeSlot;
  owned_.erase(it);
}

std::int64_t SpectrumGrid::occupied_cell_count() const {
  std::int64_t n = 0;
  for (const auto& row : rows_)
    for (auto v : row)
      if (v != kFreeSlot) ++n;
  return n;
}

std::string SpectrumGrid::snapshot(const NetworkTopology& topo) const {
  std::ostringstream out;
  for (int li = 0; li < link_count(); ++li) {
    out << topo.link(li).id;
    for (int s = 0; s < slots_; ++s) {
      out << ' ';
      if (rows_[li][s] == kFreeSlot)
        out << '.';
      else
        out << rows_[li][s];
    }
    out << '\n';
  }
  return out.str();
}

SpectrumGrid SpectrumGrid::parse_snapshot(const NetworkTopology& topo, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  int slots = -1;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> toks;
    while (ls >> tok) {
      if (tok[0] == '#') break;
      toks.push_back(tok);
    }
    if (toks.empty()) continue;
    int li = topo.link_index(toks[0]);
    if (li < 0) throw std::runtime_error("snapshot: unknown link '" + toks[0] + "'");
    toks.erase(toks.begin());
    if (slots < 0) slots = static_cast<int>(toks.size());
    if (static_cast<int>(toks.size()) != slots)
      throw std::runtime_error("snapshot: ragged row for link '" + topo.link(li).id + "'");
    rows.emplace_back(li, std::move(toks));
  }
  if (slots <= 0) throw std::runtime_error("snapshot: no rows");
  SpectrumGrid grid(topo.link_count(), slots);
  for (const auto& [li, toks] : rows) {
    for (int s = 0; s < slots; ++s) {
      if (toks[s] == ".") continue;
      std::int64_t id;
      try {
        id = std::stoll(toks[s]);
      } catch (const std::exception&) {
        throw std::runtime_error("snapshot: occupant ids must be integers, got '" + toks[s] + "'");
      }
      grid.rows_[li][s] = id;
      grid.owned_[id].emplace_back(li, s);
    }
  }
  return grid;
}

std::vector<SpectrumBlock> free_contiguous_blocks(const SpectrumGrid& grid,
                                                  const RoutePath& path, int size) {
  if (size < 1) throw std::invalid_argument("free_contiguous_blocks: size must be >= 1");
  std::vector<SpectrumBlock> out;
  const int n = grid.slot_count();
  // combined[s] == true when slot s is free on every path link
  std::vector<char> combined(n, 1);
  for (int li : path.links)
    for (int s = 0; s < n; ++s)
      if (!grid.is_free(li, s)) combined[s] = 0;
  int run = 0;
  for (int s = 0; s < n; ++s) {
    run = combined[s] ? run + 1 : 0;
    if (run >= size) out.push_back({s - size + 1, size});
  }
  return out;
}

int count_cuts(const SpectrumGrid& grid, const RoutePath& path, const SpectrumBlock& block) {
  int cuts = 0;
  for (int li : path.links) {
    bool left = block.start > 0 && grid.is_free(li, block.start - 1);
    bool right = block.end() < grid.slot_count() && grid.is_free(li, block.end());
    if (left && right) ++cuts;  // block sits strictly inside a maximal free run
  }
  return cuts;
}

int misalignment_delta(const SpectrumGrid& grid,
                       const std::vector<std::pair<int, int>>& neighbor_pairs,
                       const SpectrumBlock& block) {
  int delta = 0;
  for (const auto& pair : neighbor_pairs)
    for (int s = block.start; s < block.end(); ++s)
      delta += grid.is_free(pair.second, s) ? 1 : -1;
  return delta;
}

int misalignment_delta(const SpectrumGrid& grid, const NetworkTopology& topo,
                       const RoutePath& path, const SpectrumBlock& block) {
  return misalignment_delta(grid, neighbor_links(topo, path), block);
}

std::vector<Violation> validate_assignment(const SpectrumGrid& grid,
                                           const std::vector<Assignment>& live) {
  std::vector<Violation> out;
  const int n = grid.slot_count();
  // band edges (constraints 1-2) and continuity (constraint 5)
  for (const auto& a : live) {
    if (a.block.start < 0 || a.block.end() > n) {
      out.push_back({a.request, "block outside the usable band"});
      continue;
    }
    bool flagged = false;
    for (int li : a.path.links) {
      for (int s = a.block.start; s < a.block.end() && !flagged; ++s)
        if (grid.occupant(li, s) != a.request) {
          out.push_back({a.request, "slot " + std::to_string(s + 1) + " on link " +
                                        std::to_string(li) + " not held by the request"});
          flagged = true;
        }
      if (flagged) break;
    }
  }
  // pairwise non-overlap per link (constraints 3-4), via a claim map so the
  // check stays linear in the number of claimed cells
  std::vector<std::int64_t> claimed(static_cast<size_t>(grid.link_count()) * n, kFreeSlot);
  for (const auto& a : live) {
    if (a.block.start < 0 || a.block.end() > n) continue;  // already reported above
    for (int li : a.path.links)
      for (int s = a.block.start; s < a.block.end(); ++s) {
        auto& cell = claimed[static_cast<size_t>(li) * n + s];
        if (cell != kFreeSlot && cell != a.request) {
          out.push_back({a.request, "overlaps request " + std::to_string(cell) +
                                        " on a shared link"});
        }
        cell = a.request;
      }
  }
  return out;
}

}  // namespace eonsim
