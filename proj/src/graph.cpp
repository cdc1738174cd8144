#include "localgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "localgraph/error.hpp"

namespace localgraph {

namespace {

void check_node(Node j, std::size_t p, const char* what) {
  if (j >= p) {
    throw ArgumentError(std::string(what) + ": node index " + std::to_string(j) + " out of range [0, " +
                        std::to_string(p) + ")");
  }
}

void check_targets(const NodeSet& targets, std::size_t p, const char* what) {
  if (targets.empty()) throw ArgumentError(std::string(what) + ": target set is empty");
  for (Node t : targets) check_node(t, p, what);
}

// Multi-source BFS hop distances; -1 for unreachable.
std::vector<int> hop_distances(const TrueGraph& graph, const NodeSet& targets) {
  std::vector<int> dist(graph.p(), -1);
  std::deque<Node> frontier;
  for (Node t : targets) {
    dist[t] = 0;
    frontier.push_back(t);
  }
  while (!frontier.empty()) {
    Node u = frontier.front();
    frontier.pop_front();
    for (Node v : graph.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  return dist;
}

}  // namespace

Edge Edge::make(Node j, Node k) {
  if (j == k) throw ArgumentError("self-loop (" + std::to_string(j) + "," + std::to_string(k) + ")");
  return j < k ? Edge{j, k} : Edge{k, j};
}

TrueGraph::TrueGraph(std::size_t p) : adjacency_(p) {}

TrueGraph::TrueGraph(std::size_t p, const EdgeSet& edges) : adjacency_(p) {
  for (const Edge& e : edges) add_edge(e.a, e.b);
}

void TrueGraph::add_edge(Node j, Node k) {
  check_node(j, p(), "add_edge");
  check_node(k, p(), "add_edge");
  Edge e = Edge::make(j, k);
  if (!edges_.insert(e).second) return;
  auto insert_sorted = [](std::vector<Node>& list, Node v) {
    list.insert(std::lower_bound(list.begin(), list.end(), v), v);
  };
  insert_sorted(adjacency_[e.a], e.b);
  insert_sorted(adjacency_[e.b], e.a);
}

bool TrueGraph::has_edge(Node j, Node k) const {
  if (j == k || j >= p() || k >= p()) return false;
  return edges_.count(Edge::make(j, k)) > 0;
}

QMatrix::QMatrix(std::size_t p) : p_(p), values_(p * p, kUnrecorded) {}

void QMatrix::set(Node j, Node k, double q) {
  check_node(j, p_, "QMatrix::set");
  check_node(k, p_, "QMatrix::set");
  if (j == k) throw ArgumentError("QMatrix::set: diagonal entries are fixed at 1");
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("QMatrix::set: q-value outside [0,1]");
  values_[j * p_ + k] = q;
  values_[k * p_ + j] = q;
}

EdgeSet QMatrix::edges() const {
  EdgeSet out;
  for (Node j = 0; j < p_; ++j) {
    for (Node k = j + 1; k < p_; ++k) {
      if (recorded(j, k)) out.insert(Edge{j, k});
    }
  }
  return out;
}

std::vector<std::vector<std::pair<Node, double>>> QMatrix::adjacency() const {
  std::vector<std::vector<std::pair<Node, double>>> adj(p_);
  for (Node j = 0; j < p_; ++j) {
    for (Node k = 0; k < p_; ++k) {
      if (j != k && recorded(j, k)) adj[j].emplace_back(k, (*this)(j, k));
    }
  }
  return adj;
}

bool QMatrix::is_symmetric() const {
  for (Node j = 0; j < p_; ++j) {
    if ((*this)(j, j) != kUnrecorded) return false;
    for (Node k = j + 1; k < p_; ++k) {
      if ((*this)(j, k) != (*this)(k, j)) return false;
    }
  }
  return true;
}

Path::Path(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw ArgumentError("path needs at least two nodes");
  std::vector<Node> sorted = nodes_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ArgumentError("path nodes must be distinct");
  }
}

std::string LocalGraphEstimate::name(Node j) const {
  if (j < names.size()) return names[j];
  return "X" + std::to_string(j + 1);
}

NodeSet ball(const TrueGraph& graph, const NodeSet& targets, int r) {
  check_targets(targets, graph.p(), "ball");
  if (r < 0) throw ArgumentError("ball: radius must be nonnegative");
  std::vector<int> dist = hop_distances(graph, targets);
  NodeSet out;
  for (Node k = 0; k < graph.p(); ++k) {
    if (dist[k] >= 0 && dist[k] <= r) out.insert(k);
  }
  return out;
}

EdgeSet local_edge_set(const TrueGraph& graph, const NodeSet& targets, int r) {
  if (r < 1) throw ArgumentError("local_edge_set: radius must be at least 1");
  NodeSet inner = ball(graph, targets, r - 1);
  EdgeSet out;
  for (const Edge& e : graph.edges()) {
    if (inner.count(e.a) || inner.count(e.b)) out.insert(e);
  }
  return out;
}

double local_fdp(const EdgeSet& estimated, const EdgeSet& truth) {
  std::size_t false_count = 0;
  for (const Edge& e : estimated) {
    if (!truth.count(e)) ++false_count;
  }
  return static_cast<double>(false_count) / static_cast<double>(std::max<std::size_t>(estimated.size(), 1));
}

double local_tpr(const EdgeSet& estimated, const EdgeSet& truth) {
  if (truth.empty()) return 1.0;
  std::size_t hits = 0;
  for (const Edge& e : truth) {
    if (estimated.count(e)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<double> lightest_path_distances(const QMatrix& qmatrix, const NodeSet& targets, int r) {
  check_targets(targets, qmatrix.p(), "lightest_path_distances");
  if (r < 1) throw ArgumentError("lightest_path_distances: radius must be at least 1");
  const auto adj = qmatrix.adjacency();
  std::vector<double> dist(qmatrix.p(), kInfinity);
  for (Node t : targets) dist[t] = 0.0;
  // Hop-limited relaxation: after h rounds dist holds the lightest walk of at
  // most h hops. Weights are nonnegative, so the optimum is a simple path.
  for (int h = 1; h <= r; ++h) {
    std::vector<double> next = dist;
    bool changed = false;
    for (Node u = 0; u < qmatrix.p(); ++u) {
      if (!std::isfinite(dist[u])) continue;
      for (const auto& [v, w] : adj[u]) {
        double candidate = dist[u] + w;
        if (candidate < next[v]) {
          next[v] = candidate;
          changed = true;
        }
      }
    }
    dist = std::move(next);
    if (!changed) break;
  }
  return dist;
}

double lightest_path_distance(const QMatrix& qmatrix, const NodeSet& targets, Node j, int r) {
  check_node(j, qmatrix.p(), "lightest_path_distance");
  if (targets.count(j)) throw ArgumentError("lightest_path_distance: node is a target");
  return lightest_path_distances(qmatrix, targets, r)[j];
}

double path_qsum(const QMatrix& qmatrix, const Path& path) {
  const auto& nodes = path.nodes();
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
    check_node(nodes[s], qmatrix.p(), "path_qsum");
    check_node(nodes[s + 1], qmatrix.p(), "path_qsum");
    if (!qmatrix.recorded(nodes[s], nodes[s + 1])) {
      throw ArgumentError("path_qsum: edge (" + std::to_string(nodes[s]) + "," + std::to_string(nodes[s + 1]) +
                          ") is not recorded");
    }
    total += qmatrix(nodes[s], nodes[s + 1]);
  }
  return total;
}

std::map<Node, int> compute_layers(const QMatrix& qmatrix, const NodeSet& targets, int max_depth) {
  TrueGraph g(qmatrix.p(), qmatrix.edges());
  std::vector<int> dist = hop_distances(g, targets);
  std::map<Node, int> layers;
  for (Node k = 0; k < qmatrix.p(); ++k) {
    if (dist[k] >= 0 && dist[k] <= max_depth) layers[k] = dist[k];
  }
  return layers;
}

LocalGraphEstimate prune(const LocalGraphEstimate& estimate, double q_path_threshold) {
  if (!(q_path_threshold >= 0.0 && q_path_threshold <= 1.0)) {
    throw ArgumentError("prune: threshold must lie in [0,1]");
  }
  LocalGraphEstimate out = estimate;
  if (estimate.radius < 1) return out;
  const std::vector<double> dist = lightest_path_distances(estimate.qmatrix, estimate.targets, estimate.radius);
  const std::size_t p = estimate.qmatrix.p();
  // A node on a surviving lightest path has a lighter prefix, so one pass is
  // enough and the result is a fixed point.
  for (Node v = 0; v < p; ++v) {
    if (estimate.targets.count(v) || dist[v] <= q_path_threshold) continue;
    for (Node k = 0; k < p; ++k) {
      if (k != v && out.qmatrix.recorded(v, k)) {
        out.qmatrix.clear(v, k);
        out.efp.erase(Edge::make(v, k));
      }
    }
  }
  out.layer = compute_layers(out.qmatrix, out.targets, out.radius);
  return out;
}

}  // namespace localgraph
