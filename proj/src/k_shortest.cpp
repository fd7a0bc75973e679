#include <algorithm>
#include <optional>
#include <queue>
#include <set>

#include "eonsim/topology.hpp"

namespace eonsim {

namespace {

// Total order used everywhere paths are ranked: length, then the node-id
// sequence. Lengths are recomputed through make_route so equal paths compare
// bit-identically regardless of how they were found.
bool node_seq_less(const NetworkTopology& topo,
                   const std::vector<int>& a, const std::vector<int>& b) {
  const size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return topo.node_ids()[a[i]] < topo.node_ids()[b[i]];
  }
  return a.size() < b.size();
}

bool path_less(const NetworkTopology& topo, const RoutePath& a, const RoutePath& b) {
  if (a.length_km != b.length_km) return a.length_km < b.length_km;
  return node_seq_less(topo, a.nodes, b.nodes);
}

// Shortest path under (length, node-id sequence), avoiding banned nodes/links.
std::optional<RoutePath> dijkstra(const NetworkTopology& topo, int src, int dst,
                                  const std::vector<char>& banned_link,
                                  const std::vector<char>& banned_node) {
  struct Label {
    double dist;
    int node;
    std::vector<int> nodes;
    std::vector<int> links;
  };
  auto label_greater = [&](const Label& x, const Label& y) {
    if (x.dist != y.dist) return x.dist > y.dist;
    return node_seq_less(topo, y.nodes, x.nodes);
  };
  std::priority_queue<Label, std::vector<Label>, decltype(label_greater)> pq(label_greater);
  std::vector<char> done(topo.node_count(), 0);
  pq.push({0.0, src, {src}, {}});
  while (!pq.empty()) {
    Label cur = pq.top();
    pq.pop();
    if (done[cur.node]) continue;
    done[cur.node] = 1;
    if (cur.node == dst) return make_route(topo, src, cur.links);
    for (int li : topo.incident_links(cur.node)) {
      if (banned_link[li]) continue;
      const auto& l = topo.link(li);
      int w = l.other(cur.node);
      if (done[w] || banned_node[w]) continue;
      Label next = cur;
      next.dist += l.length_km;
      next.node = w;
      next.nodes.push_back(w);
      next.links.push_back(li);
      pq.push(std::move(next));
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<RoutePath> k_shortest_paths(const NetworkTopology& topo,
                                        int src, int dst, int k) {
  if (src == dst) throw std::invalid_argument("k_shortest_paths: src == dst");
  if (src < 0 || src >= topo.node_count() || dst < 0 || dst >= topo.node_count())
    throw std::invalid_argument("k_shortest_paths: node out of range");
  if (k < 1) throw std::invalid_argument("k_shortest_paths: k must be >= 1");

  std::vector<RoutePath> found;
  std::vector<char> no_link(topo.link_count(), 0), no_node(topo.node_count(), 0);
  auto first = dijkstra(topo, src, dst, no_link, no_node);
  if (!first) return found;
  found.push_back(*first);

  auto cand_less = [&](const RoutePath& a, const RoutePath& b) {
    return path_less(topo, a, b);
  };
  std::set<std::vector<int>> cand_seen;  // node sequences already queued
  std::vector<RoutePath> candidates;

  while (static_cast<int>(found.size()) < k) {
    const RoutePath& prev = found.back();
    // Yen spur step: branch off every prefix of the last accepted path.
    for (size_t j = 0; j + 1 < prev.nodes.size(); ++j) {
      std::vector<char> banned_link(topo.link_count(), 0);
      std::vector<char> banned_node(topo.node_count(), 0);
      std::vector<int> root_nodes(prev.nodes.begin(), prev.nodes.begin() + j + 1);
      std::vector<int> root_links(prev.links.begin(), prev.links.begin() + j);
      for (const RoutePath& p : found) {
        if (p.nodes.size() > j &&
            std::equal(root_nodes.begin(), root_nodes.end(), p.nodes.begin()))
          if (p.links.size() > j) banned_link[p.links[j]] = 1;
      }
      for (size_t m = 0; m < j; ++m) banned_node[prev.nodes[m]] = 1;
      auto spur = dijkstra(topo, prev.nodes[j], dst, banned_link, banned_node);
      if (!spur) continue;
      std::vector<int> link_seq = root_links;
      link_seq.insert(link_seq.end(), spur->links.begin(), spur->links.end());
      RoutePath total;
      try {
        total = make_route(topo, src, link_seq);
      } catch (const std::invalid_argument&) {
        continue;  // spur re-entered the root
      }
      if (cand_seen.insert(total.nodes).second) candidates.push_back(std::move(total));
    }
    if (candidates.empty()) break;
    auto best = std::min_element(candidates.begin(), candidates.end(), cand_less);
    found.push_back(*best);
    candidates.erase(best);
  }
  return found;
}

std::vector<RoutePath> all_simple_paths(const NetworkTopology& topo, int src, int dst) {
  if (src == dst) throw std::invalid_argument("all_simple_paths: src == dst");
  std::vector<RoutePath> out;
  std::vector<char> visited(topo.node_count(), 0);
  std::vector<int> link_seq;
  auto dfs = [&](auto&& self, int at) -> void {
    if (at == dst) {
      out.push_back(make_route(topo, src, link_seq));
      return;
    }
    for (int li : topo.incident_links(at)) {
      int w = topo.link(li).other(at);
      if (visited[w]) continue;
      visited[w] = 1;
      link_seq.push_back(li);
      self(self, w);
      link_seq.pop_back();
      visited[w] = 0;
    }
  };
  visited[src] = 1;
  dfs(dfs, src);
  std::sort(out.begin(), out.end(),
            [&](const RoutePath& a, const RoutePath& b) { return path_less(topo, a, b); });
  return out;
}

}  // namespace eonsim
