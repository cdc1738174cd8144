#include "localgraph/pfs.hpp"

#include <climits>
#include <vector>

#include "localgraph/error.hpp"
#include "localgraph/parallel.hpp"
#include "localgraph/random.hpp"

namespace localgraph {

namespace {

void check_fraction(double v, const std::string& what) {
  if (!(v >= 0.0 && v <= 1.0)) throw ArgumentError(what + " must lie in [0,1]");
}

int layer_of(const AdmissionLayers& layers, Node j) {
  auto it = layers.find(j);
  return it == layers.end() ? INT_MAX : it->second;
}

// Rethrows the in-flight library error with the node name prefixed, keeping
// its type.
[[noreturn]] void rethrow_for_node(const std::string& node) {
  const std::string prefix = "node " + node + ": ";
  try {
    throw;
  } catch (const DegenerateError& e) {
    throw DegenerateError(prefix + e.what());
  } catch (const TooFewSamplesError& e) {
    throw TooFewSamplesError(prefix + e.what());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(prefix + e.what(), e.residual());
  } catch (const ArgumentError& e) {
    throw ArgumentError(prefix + e.what());
  } catch (const Error& e) {
    throw Error(prefix + e.what());
  }
}

}  // namespace

const char* to_string(RecordRule rule) { return rule == RecordRule::kForward ? "forward" : "minimum"; }

RecordRule parse_rule(const std::string& text) {
  if (text == "minimum") return RecordRule::kMinimum;
  if (text == "forward") return RecordRule::kForward;
  throw ArgumentError("unknown rule '" + text + "' (expected \"minimum\" or \"forward\")");
}

void PfsConfig::validate(std::size_t p) const {
  if (r_max < 1) throw ArgumentError("pfs: r_max must be at least 1");
  if (q_thresholds.size() != static_cast<std::size_t>(r_max)) {
    throw ArgumentError("pfs: expected " + std::to_string(r_max) + " neighborhood thresholds, got " +
                        std::to_string(q_thresholds.size()));
  }
  for (double q : q_thresholds) check_fraction(q, "pfs: neighborhood threshold");
  check_fraction(q_path, "pfs: q_path");
  for (const auto& [node, q] : node_thresholds) {
    if (node >= p) throw ArgumentError("pfs: node threshold for out-of-range node");
    check_fraction(q, "pfs: node threshold");
  }
  for (const auto& entry : groups) {
    if (entry.first >= p) throw ArgumentError("pfs: group label for out-of-range node");
  }
  if (intermodal_threshold) check_fraction(*intermodal_threshold, "pfs: intermodal threshold");
  for (double q : intramodal_thresholds) check_fraction(q, "pfs: intramodal threshold");
  estimator.validate();
}

double PfsConfig::threshold(Node j, Node k, int r) const {
  if (auto it = node_thresholds.find(j); it != node_thresholds.end()) return it->second;
  auto gj = groups.find(j);
  auto gk = groups.find(k);
  if (gj != groups.end() && gk != groups.end()) {
    if (gj->second != gk->second) {
      if (intermodal_threshold) return *intermodal_threshold;
    } else if (r >= 1 && static_cast<std::size_t>(r) <= intramodal_thresholds.size()) {
      return intramodal_thresholds[static_cast<std::size_t>(r - 1)];
    }
  }
  return q_thresholds.at(static_cast<std::size_t>(r - 1));
}

void record_edge(QMatrix& qmatrix, Node j, Node k, double q, RecordRule rule, const AdmissionLayers& layers) {
  if (j == k) throw ArgumentError("record_edge: j and k must differ");
  check_fraction(q, "record_edge: q");
  const double current = qmatrix(j, k);
  if (rule == RecordRule::kForward) {
    const int lj = layer_of(layers, j);
    const int lk = layer_of(layers, k);
    if (lj < lk) {
      qmatrix.set(j, k, q);
      return;
    }
    if (lj > lk) return;
  }
  if (q < current) qmatrix.set(j, k, q);
}

NodeSet next_layer(const QMatrix& qmatrix, const NodeSet& targets, const NodeSet& visited, int r, double q_path) {
  const std::vector<double> dist = lightest_path_distances(qmatrix, targets, r);
  NodeSet out;
  for (Node j = 0; j < qmatrix.p(); ++j) {
    if (!visited.count(j) && dist[j] <= q_path) out.insert(j);
  }
  return out;
}

std::uint64_t node_seed(std::uint64_t seed, Node j) { return derive_seed(seed, static_cast<std::uint64_t>(j)); }

LocalGraphEstimate run_pfs(const DataMatrix& x, const NodeSet& targets, const PfsConfig& config, PfsTrace* trace,
                           const NeighborEstimator& estimator) {
  const std::size_t p = x.p();
  config.validate(p);
  if (targets.empty()) throw ArgumentError("pfs: target set is empty");
  for (Node t : targets) {
    if (t >= p) throw ArgumentError("pfs: target index out of range");
  }
  const NeighborEstimator estimate = estimator ? estimator : NeighborEstimator(estimate_neighbor_qvalues);

  LocalGraphEstimate out;
  out.targets = targets;
  out.radius = config.r_max;
  out.qmatrix = QMatrix(p);
  out.names = x.names();
  out.groups = config.groups;

  AdmissionLayers admission;
  for (Node t : targets) admission[t] = 0;
  NodeSet visited = targets;
  NodeSet current = targets;

  for (int r = 1; r <= config.r_max && !current.empty(); ++r) {
    const std::vector<Node> layer(current.begin(), current.end());
    std::vector<EfpQVector> results(layer.size());
    parallel_for(layer.size(), config.threads, [&](std::size_t i, std::size_t) {
      const Node j = layer[i];
      EstimatorConfig cfg = config.estimator;
      cfg.seed = node_seed(config.estimator.seed, j);
      try {
        results[i] = estimate(x, j, cfg);
      } catch (const Error&) {
        rethrow_for_node(x.names()[j]);
      }
    });

    // Sequential reduction in ascending node order.
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const Node j = layer[i];
      const EfpQVector& res = results[i];
      out.estimated.push_back(j);
      if (trace) trace->estimated.push_back(j);
      for (std::size_t c = 0; c < res.features.size(); ++c) {
        const Node k = res.features[c];
        const double q = res.q[static_cast<Eigen::Index>(c)];
        if (q > config.threshold(j, k, r)) continue;
        const double before = out.qmatrix(j, k);
        record_edge(out.qmatrix, j, k, q, config.rule, admission);
        if (out.qmatrix(j, k) != before) out.efp[Edge::make(j, k)] = res.efp[static_cast<Eigen::Index>(c)];
      }
      if (trace && config.rule == RecordRule::kMinimum && !out.qmatrix.is_symmetric()) {
        trace->symmetric_throughout = false;
      }
    }

    current = next_layer(out.qmatrix, targets, visited, r, config.q_path);
    for (Node j : current) admission[j] = r;
    visited.insert(current.begin(), current.end());
    if (trace) trace->admitted.push_back(current);
  }

  out.layer = compute_layers(out.qmatrix, targets, config.r_max);
  return out;
}

}  // namespace localgraph
