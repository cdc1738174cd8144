#pragma once

#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace localgraph {

// Nodes are 0-based column indices; variable names carry the 1-based "X1"
// style labels used in reports.
using Node = std::size_t;
using NodeSet = std::set<Node>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Unordered node pair stored with a < b.
struct Edge {
  Node a = 0;
  Node b = 0;

  static Edge make(Node j, Node k);
  auto operator<=>(const Edge&) const = default;
};

using EdgeSet = std::set<Edge>;

// Undirected simple graph over p nodes.
class TrueGraph {
 public:
  explicit TrueGraph(std::size_t p = 0);
  TrueGraph(std::size_t p, const EdgeSet& edges);

  void add_edge(Node j, Node k);

  std::size_t p() const { return adjacency_.size(); }
  const EdgeSet& edges() const { return edges_; }
  const std::vector<Node>& neighbors(Node j) const { return adjacency_.at(j); }
  bool has_edge(Node j, Node k) const;

 private:
  std::vector<std::vector<Node>> adjacency_;
  EdgeSet edges_;
};

// Dense symmetric matrix of edge q-values. 1.0 means "no edge recorded";
// an edge exists iff its entry is strictly below 1.
class QMatrix {
 public:
  static constexpr double kUnrecorded = 1.0;

  explicit QMatrix(std::size_t p = 0);

  std::size_t p() const { return p_; }
  double operator()(Node j, Node k) const { return values_[j * p_ + k]; }
  bool recorded(Node j, Node k) const { return (*this)(j, k) < kUnrecorded; }

  // Writes both (j,k) and (k,j). Rejects j == k and q outside [0,1].
  void set(Node j, Node k, double q);
  void clear(Node j, Node k) { set(j, k, kUnrecorded); }

  EdgeSet edges() const;
  // Recorded neighbors of every node with their weights, ascending by node.
  std::vector<std::vector<std::pair<Node, double>>> adjacency() const;
  bool is_symmetric() const;

  bool operator==(const QMatrix&) const = default;

 private:
  std::size_t p_;
  std::vector<double> values_;
};

// Ordered sequence of distinct nodes (j0, ..., jr), r >= 1.
class Path {
 public:
  explicit Path(std::vector<Node> nodes);
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t length() const { return nodes_.size() - 1; }

 private:
  std::vector<Node> nodes_;
};

struct LocalGraphEstimate {
  NodeSet targets;
  int radius = 0;
  QMatrix qmatrix;
  // Hop distance from the targets over recorded edges; 0 for targets.
  std::map<Node, int> layer;

  // Diagnostics carried along for export.
  std::map<Edge, double> efp;
  std::vector<std::string> names;
  std::map<Node, std::string> groups;
  std::vector<Node> estimated;  // nodes whose neighborhoods were estimated, in order
  std::string config_hash;

  std::string name(Node j) const;
  EdgeSet edges() const { return qmatrix.edges(); }
  TrueGraph graph() const { return TrueGraph(qmatrix.p(), qmatrix.edges()); }
};

// B_r(V0): nodes within graph distance r of any target.
NodeSet ball(const TrueGraph& graph, const NodeSet& targets, int r);

// E_r(V0): edges with at least one endpoint in B_{r-1}(V0). Requires r >= 1.
EdgeSet local_edge_set(const TrueGraph& graph, const NodeSet& targets, int r);

// |estimated \ truth| / max(|estimated|, 1).
double local_fdp(const EdgeSet& estimated, const EdgeSet& truth);

// |estimated ∩ truth| / |truth|; 1 when truth is empty (nothing to miss).
double local_tpr(const EdgeSet& estimated, const EdgeSet& truth);

// Lightest sum of q-values over recorded paths of at most r hops from any
// target to j; +inf when unreachable. j must not be a target.
double lightest_path_distance(const QMatrix& qmatrix, const NodeSet& targets, Node j, int r);

// Same quantity for every node at once (0 for targets).
std::vector<double> lightest_path_distances(const QMatrix& qmatrix, const NodeSet& targets, int r);

// Sum of q-values along a path whose consecutive pairs are all recorded.
double path_qsum(const QMatrix& qmatrix, const Path& path);

// BFS hop distances over recorded edges, limited to max_depth.
std::map<Node, int> compute_layers(const QMatrix& qmatrix, const NodeSet& targets, int max_depth);

// Drops every non-target node whose lightest path distance (within the
// estimate's radius) exceeds the threshold, together with its edges.
LocalGraphEstimate prune(const LocalGraphEstimate& estimate, double q_path_threshold);

}  // namespace localgraph
