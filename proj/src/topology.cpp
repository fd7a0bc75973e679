#include "eonsim/topology.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace eonsim {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error("topology: " + msg);
}

}  // namespace

NetworkTopology::NetworkTopology(std::string name,
                                 std::vector<std::string> node_ids,
                                 std::vector<Link> links)
    : name_(std::move(name)), node_ids_(std::move(node_ids)), links_(std::move(links)) {
  require(!node_ids_.empty(), "no nodes");
  std::unordered_set<std::string> seen;
  for (const auto& id : node_ids_) {
    require(!id.empty(), "empty node id");
    require(seen.insert(id).second, "duplicate node id '" + id + "'");
  }
  seen.clear();
  incidence_.assign(node_ids_.size(), {});
  const int n = node_count();
  for (int i = 0; i < link_count(); ++i) {
    const Link& l = links_[i];
    require(!l.id.empty(), "empty link id");
    require(seen.insert(l.id).second, "duplicate link id '" + l.id + "'");
    require(l.a >= 0 && l.a < n && l.b >= 0 && l.b < n, "link '" + l.id + "' has a dangling endpoint");
    require(l.a != l.b, "link '" + l.id + "' is a self loop");
    require(l.length_km > 0.0, "link '" + l.id + "' has non-positive length");
    incidence_[l.a].push_back(i);
    incidence_[l.b].push_back(i);
  }
  // Connectivity is required for uniform source-destination sampling.
  std::vector<char> visited(n, 0);
  std::vector<int> stack{0};
  visited[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int li : incidence_[v]) {
      int w = links_[li].other(v);
      if (!visited[w]) {
        visited[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  require(reached == n, "graph is not connected");
}

NetworkTopology NetworkTopology::from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("topology: JSON parse failure: ") + e.what());
  }
  require(doc.contains("nodes") && doc["nodes"].is_array(), "missing 'nodes' array");
  require(doc.contains("links") && doc["links"].is_array(), "missing 'links' array");

  std::vector<std::string> nodes;
  for (const auto& n : doc["nodes"]) {
    require(n.is_string(), "node ids must be strings");
    nodes.push_back(n.get<std::string>());
  }
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) index[nodes[i]] = i;

  std::vector<Link> links;
  for (const auto& l : doc["links"]) {
    require(l.contains("id") && l.contains("a") && l.contains("b") && l.contains("length_km"),
            "link entries need id/a/b/length_km");
    Link link;
    link.id = l["id"].get<std::string>();
    const std::string a = l["a"].get<std::string>();
    const std::string b = l["b"].get<std::string>();
    auto ia = index.find(a);
    auto ib = index.find(b);
    require(ia != index.end(), "link '" + link.id + "' endpoint '" + a + "' is not a node");
    require(ib != index.end(), "link '" + link.id + "' endpoint '" + b + "' is not a node");
    link.a = ia->second;
    link.b = ib->second;
    link.length_km = l["length_km"].get<double>();
    links.push_back(std::move(link));
  }
  std::string name = doc.value("name", "");
  return NetworkTopology(std::move(name), std::move(nodes), std::move(links));
}

NetworkTopology NetworkTopology::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("topology: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

int NetworkTopology::node_index(const std::string& id) const {
  for (int i = 0; i < node_count(); ++i)
    if (node_ids_[i] == id) return i;
  return -1;
}

int NetworkTopology::link_index(const std::string& id) const {
  for (int i = 0; i < link_count(); ++i)
    if (links_[i].id == id) return i;
  return -1;
}

RoutePath make_route(const NetworkTopology& topo, int src, const std::vector<int>& link_seq) {
  RoutePath p;
  p.nodes.push_back(src);
  std::unordered_set<int> seen{src};
  int at = src;
  for (int li : link_seq) {
    const auto& l = topo.link(li);
    if (!l.touches(at)) throw std::invalid_argument("make_route: link does not continue the path");
    at = l.other(at);
    if (!seen.insert(at).second) throw std::invalid_argument("make_route: path repeats a node");
    p.links.push_back(li);
    p.nodes.push_back(at);
    p.length_km += l.length_km;
  }
  return p;
}

std::vector<std::pair<int, int>> neighbor_links(const NetworkTopology& topo,
                                                const RoutePath& path) {
  std::vector<std::pair<int, int>> pairs;
  if (path.links.empty()) return pairs;
  std::vector<char> on_path(topo.link_count(), 0);
  int max_ord = 0;
  for (int li : path.links) {
    on_path[li] = 1;
    max_ord = std::max(max_ord, li);
  }
  for (int li : path.links) {
    const auto& l = topo.link(li);
    for (int endpoint : {l.a, l.b}) {
      for (int nb : topo.incident_links(endpoint)) {
        if (on_path[nb]) continue;
        if (nb > max_ord) continue;  // neighbours declared after every path link are not counted
        pairs.emplace_back(li, nb);
      }
    }
  }
  return pairs;
}

}  // namespace eonsim
