#pragma once

#include <string>
#include <utility>
#include <vector>

namespace eonsim {

/// Undirected weighted graph of optical nodes and fiber links.
/// Immutable after construction; all queries are pure.
class NetworkTopology {
 public:
  struct Link {
    std::string id;
    int a = -1;
    int b = -1;
    double length_km = 0.0;

    int other(int node) const { return node == a ? b : a; }
    bool touches(int node) const { return node == a || node == b; }
  };

  NetworkTopology(std::string name,
                  std::vector<std::string> node_ids,
                  std::vector<Link> links);

  /// Parses the JSON topology document {name?, nodes:[...], links:[{id,a,b,length_km}]}.
  /// Throws std::runtime_error on malformed documents or invariant violations
  /// (duplicate ids, dangling endpoints, self loops, non-positive lengths,
  /// disconnected graph).
  static NetworkTopology from_json(const std::string& text);
  static NetworkTopology load_file(const std::string& path);

  const std::string& name() const { return name_; }
  int node_count() const { return static_cast<int>(node_ids_.size()); }
  int link_count() const { return static_cast<int>(links_.size()); }
  const std::vector<std::string>& node_ids() const { return node_ids_; }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(int idx) const { return links_[idx]; }

  /// Node/link lookup by id; -1 if absent.
  int node_index(const std::string& id) const;
  int link_index(const std::string& id) const;

  /// Link indices incident to a node.
  const std::vector<int>& incident_links(int node) const { return incidence_[node]; }

 private:
  std::string name_;
  std::vector<std::string> node_ids_;
  std::vector<Link> links_;
  std::vector<std::vector<int>> incidence_;
};

/// A simple (loopless) path, stored as ordered link and node index lists.
struct RoutePath {
  std::vector<int> links;
  std::vector<int> nodes;  // nodes.size() == links.size() + 1
  double length_km = 0.0;

  int hop_count() const { return static_cast<int>(links.size()); }
  bool empty() const { return links.empty(); }
};

/// Builds the path from src along the given link sequence, checking that the
/// links chain and that no node repeats. Throws std::invalid_argument otherwise.
RoutePath make_route(const NetworkTopology& topo, int src, const std::vector<int>& link_seq);

/// (path link, neighbour link) pairs used by the fragmentation misalignment
/// terms. A neighbour is an off-path link sharing an endpoint with a path
/// link; a link adjacent to two path links is paired with each. A neighbour
/// declared after every path link in the topology's link list is skipped.
std::vector<std::pair<int, int>> neighbor_links(const NetworkTopology& topo,
                                                const RoutePath& path);

/// Up to k loopless paths from src to dst, ordered by (length, node-id
/// sequence). Returns an empty list when no path exists.
std::vector<RoutePath> k_shortest_paths(const NetworkTopology& topo,
                                        int src, int dst, int k);

/// All simple src->dst paths, ordered like k_shortest_paths.
std::vector<RoutePath> all_simple_paths(const NetworkTopology& topo, int src, int dst);

}  // namespace eonsim
