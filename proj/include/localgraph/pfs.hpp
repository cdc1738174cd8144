#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "localgraph/data_matrix.hpp"
#include "localgraph/graph.hpp"
#include "localgraph/qvalue.hpp"

namespace localgraph {

enum class RecordRule { kMinimum, kForward };

const char* to_string(RecordRule rule);
RecordRule parse_rule(const std::string& text);

struct PfsConfig {
  int r_max = 1;
  std::vector<double> q_thresholds{0.2};  // q*_1 .. q*_{r_max}
  double q_path = 0.2;
  RecordRule rule = RecordRule::kMinimum;
  EstimatorConfig estimator;

  // Threshold used for every candidate k while node j is the response.
  std::map<Node, double> node_thresholds;
  // Variable groups (modalities). When both endpoints carry a group label the
  // intermodal threshold applies to different-group pairs and the per-radius
  // intramodal threshold to same-group pairs.
  std::map<Node, std::string> groups;
  std::optional<double> intermodal_threshold;
  std::vector<double> intramodal_thresholds;  // by radius; may be shorter than r_max

  int threads = 1;  // per-layer fan-out of neighborhood estimations

  void validate(std::size_t p) const;
  // Resolution: node override > group-pair threshold > per-radius default.
  double threshold(Node j, Node k, int r) const;
};

// Algorithm-level admission layers: targets 0, a node admitted after
// iteration r gets r. Nodes absent from the map are unvisited.
using AdmissionLayers = std::map<Node, int>;

// Records q = q_j(k) for the pair (j, k) under the given rule.
// Minimum: both entries become min(q, current). Forward: if j is strictly
// closer to the targets than k the entries take q (an unvisited k counts as
// farthest); if k is closer the value is ignored; equal layers use the minimum.
void record_edge(QMatrix& qmatrix, Node j, Node k, double q, RecordRule rule, const AdmissionLayers& layers);

// {j not visited : lightest path distance within r hops <= q_path}.
NodeSet next_layer(const QMatrix& qmatrix, const NodeSet& targets, const NodeSet& visited, int r, double q_path);

// Per-node neighborhood estimator; the default uses estimate_neighbor_qvalues.
using NeighborEstimator = std::function<EfpQVector(const DataMatrix&, Node, const EstimatorConfig&)>;

struct PfsTrace {
  std::vector<Node> estimated;                   // in estimation order
  std::vector<NodeSet> admitted;                 // admitted[r-1]: layer admitted after iteration r
  bool symmetric_throughout = true;              // QMatrix symmetric after every record
};

// Seed used for node j's estimator: config seed mixed with the node index.
std::uint64_t node_seed(std::uint64_t seed, Node j);

LocalGraphEstimate run_pfs(const DataMatrix& x, const NodeSet& targets, const PfsConfig& config,
                           PfsTrace* trace = nullptr, const NeighborEstimator& estimator = {});

}  // namespace localgraph
