#pragma once

#include <string>
#include <vector>

#include "localgraph/graph.hpp"
#include "localgraph/simgen.hpp"

namespace localgraph {

enum class GraphFormat { kDot, kJson };

GraphFormat parse_format(const std::string& text);

// Nodes are the targets plus every endpoint of a recorded edge, ascending by
// index; edges are in lexicographic (a, b) order. q labels carry three
// decimals in DOT and full precision in JSON.
std::string export_dot(const LocalGraphEstimate& estimate);
std::string export_json(const LocalGraphEstimate& estimate);
std::string export_graph(const LocalGraphEstimate& estimate, GraphFormat format);

// Inverse of export_json.
LocalGraphEstimate parse_estimate_json(const std::string& text);
LocalGraphEstimate read_estimate(const std::string& path);

std::string truth_json(const TrueGraph& truth, const std::vector<std::string>& names);
TrueGraph parse_truth_json(const std::string& text);

// Simulation metadata and true graph of an instance.
std::string instance_json(const SimulatedInstance& instance, const DesignPreset& preset);
std::string matrix_csv(const Eigen::MatrixXd& m);

std::string read_text(const std::string& path);
// Writes to a sibling temporary file, then renames over the destination.
void write_atomic(const std::string& path, const std::string& contents);

}  // namespace localgraph
