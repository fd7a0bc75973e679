#pragma once

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "eonsim/spectrum.hpp"
#include "eonsim/topology.hpp"

namespace eonsim::test {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("test fixture missing: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline NetworkTopology load_fig1() { return NetworkTopology::load_file("data/fig1.json"); }

inline SpectrumGrid load_fig1_grid(const NetworkTopology& topo) {
  return SpectrumGrid::parse_snapshot(topo, slurp("data/fig1-grid.txt"));
}

inline RoutePath route_by_nodes(const NetworkTopology& topo,
                                const std::vector<std::string>& node_ids) {
  std::vector<int> links;
  for (size_t i = 0; i + 1 < node_ids.size(); ++i) {
    int a = topo.node_index(node_ids[i]);
    int b = topo.node_index(node_ids[i + 1]);
    int found = -1;
    for (int li : topo.incident_links(a))
      if (topo.link(li).touches(b)) found = li;
    if (found < 0) throw std::runtime_error("route_by_nodes: no such edge");
    links.push_back(found);
  }
  return make_route(topo, topo.node_index(node_ids[0]), links);
}

/// Random connected graph on up to `max_nodes` nodes with string ids "n0"...
inline NetworkTopology random_topology(std::mt19937_64& rng, int max_nodes) {
  std::uniform_int_distribution<int> node_count(3, max_nodes);
  const int n = node_count(rng);
  std::vector<std::string> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back("n" + std::to_string(i));
  std::vector<NetworkTopology::Link> links;
  std::uniform_int_distribution<int> len(1, 50);
  auto add_link = [&](int a, int b) {
    for (const auto& l : links)
      if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return;
    NetworkTopology::Link l;
    l.id = "e" + std::to_string(links.size());
    l.a = a;
    l.b = b;
    l.length_km = 10.0 * len(rng);
    links.push_back(l);
  };
  // random spanning tree, then extra edges
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> prev(0, i - 1);
    add_link(i, prev(rng));
  }
  std::uniform_int_distribution<int> extra_count(0, n);
  std::uniform_int_distribution<int> pick(0, n - 1);
  const int extras = extra_count(rng);
  for (int e = 0; e < extras; ++e) {
    int a = pick(rng), b = pick(rng);
    if (a != b) add_link(a, b);
  }
  return NetworkTopology("random", nodes, links);
}

/// Occupies each cell independently with probability `fill`, each with its
/// own fake request id.
inline SpectrumGrid random_grid(std::mt19937_64& rng, const NetworkTopology& topo, int slots,
                                double fill) {
  SpectrumGrid grid(topo.link_count(), slots);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::int64_t id = 1000;
  for (int li = 0; li < topo.link_count(); ++li)
    for (int s = 0; s < slots; ++s)
      if (coin(rng) < fill) {
        RoutePath stub;
        stub.links = {li};
        stub.nodes = {topo.link(li).a, topo.link(li).b};
        stub.length_km = topo.link(li).length_km;
        grid.allocate(stub, {s, 1}, id++);
      }
  return grid;
}

}  // namespace eonsim::test
