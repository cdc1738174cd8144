#include "localgraph/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "localgraph/csv.hpp"
#include "localgraph/error.hpp"

namespace localgraph {

namespace {

using nlohmann::ordered_json;

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

NodeSet display_nodes(const LocalGraphEstimate& est) {
  NodeSet nodes = est.targets;
  for (const Edge& e : est.edges()) {
    nodes.insert(e.a);
    nodes.insert(e.b);
  }
  return nodes;
}

ordered_json parse_json(const std::string& text, const std::string& what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(what + ": invalid JSON (" + e.what() + ")");
  }
}

void check_version(const ordered_json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("format_version") || j["format_version"] != 1) {
    throw ArgumentError(what + ": unsupported or missing format_version");
  }
}

}  // namespace

GraphFormat parse_format(const std::string& text) {
  if (text == "dot") return GraphFormat::kDot;
  if (text == "json") return GraphFormat::kJson;
  throw ArgumentError("unknown format '" + text + "' (expected dot or json)");
}

std::string export_dot(const LocalGraphEstimate& est) {
  std::ostringstream out;
  out << "// format_version=1\n";
  out << "graph local_graph {\n";
  for (Node j : display_nodes(est)) {
    out << "  v" << j << " [label=" << dot_quote(est.name(j));
    if (auto it = est.layer.find(j); it != est.layer.end()) out << ", layer=" << it->second;
    if (auto it = est.groups.find(j); it != est.groups.end()) out << ", group=" << dot_quote(it->second);
    if (est.targets.count(j)) out << ", target=true";
    out << "];\n";
  }
  for (const Edge& e : est.edges()) {
    char label[32];
    std::snprintf(label, sizeof label, "%.3f", est.qmatrix(e.a, e.b));
    out << "  v" << e.a << " -- v" << e.b << " [label=\"" << label << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

std::string export_json(const LocalGraphEstimate& est) {
  const std::size_t p = est.qmatrix.p();
  ordered_json j;
  j["format_version"] = 1;
  j["p"] = p;
  std::vector<std::string> names;
  for (Node k = 0; k < p; ++k) names.push_back(est.name(k));
  j["variables"] = names;
  j["targets"] = std::vector<Node>(est.targets.begin(), est.targets.end());
  j["radius"] = est.radius;
  j["config_hash"] = est.config_hash;
  j["estimated"] = est.estimated;
  ordered_json nodes = ordered_json::array();
  for (Node k : display_nodes(est)) {
    ordered_json node;
    node["id"] = k;
    node["name"] = est.name(k);
    auto layer = est.layer.find(k);
    node["layer"] = layer == est.layer.end() ? ordered_json(nullptr) : ordered_json(layer->second);
    auto group = est.groups.find(k);
    node["group"] = group == est.groups.end() ? ordered_json(nullptr) : ordered_json(group->second);
    nodes.push_back(std::move(node));
  }
  j["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (const Edge& e : est.edges()) {
    ordered_json edge;
    edge["a"] = e.a;
    edge["b"] = e.b;
    edge["q"] = est.qmatrix(e.a, e.b);
    auto efp = est.efp.find(e);
    edge["efp"] = efp == est.efp.end() ? ordered_json(nullptr) : ordered_json(efp->second);
    edges.push_back(std::move(edge));
  }
  j["edges"] = std::move(edges);
  return j.dump(2) + "\n";
}

std::string export_graph(const LocalGraphEstimate& estimate, GraphFormat format) {
  return format == GraphFormat::kDot ? export_dot(estimate) : export_json(estimate);
}

LocalGraphEstimate parse_estimate_json(const std::string& text) {
  const ordered_json j = parse_json(text, "estimate");
  check_version(j, "estimate");
  try {
    LocalGraphEstimate est;
    const auto p = j.at("p").get<std::size_t>();
    est.qmatrix = QMatrix(p);
    est.names = j.at("variables").get<std::vector<std::string>>();
    if (est.names.size() != p) throw ArgumentError("estimate: variables length differs from p");
    for (Node t : j.at("targets").get<std::vector<Node>>()) {
      if (t >= p) throw ArgumentError("estimate: target out of range");
      est.targets.insert(t);
    }
    est.radius = j.at("radius").get<int>();
    est.config_hash = j.at("config_hash").get<std::string>();
    est.estimated = j.at("estimated").get<std::vector<Node>>();
    for (const auto& node : j.at("nodes")) {
      const auto id = node.at("id").get<Node>();
      if (id >= p) throw ArgumentError("estimate: node id out of range");
      if (!node.at("layer").is_null()) est.layer[id] = node.at("layer").get<int>();
      if (!node.at("group").is_null()) est.groups[id] = node.at("group").get<std::string>();
    }
    for (const auto& edge : j.at("edges")) {
      const auto a = edge.at("a").get<Node>();
      const auto b = edge.at("b").get<Node>();
      if (a >= p || b >= p) throw ArgumentError("estimate: edge endpoint out of range");
      const double q = edge.at("q").get<double>();
      if (!(q < QMatrix::kUnrecorded)) throw ArgumentError("estimate: edge q-value must be below 1");
      est.qmatrix.set(a, b, q);
      if (!edge.at("efp").is_null()) est.efp[Edge::make(a, b)] = edge.at("efp").get<double>();
    }
    return est;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("estimate: malformed document (") + e.what() + ")");
  }
}

LocalGraphEstimate read_estimate(const std::string& path) { return parse_estimate_json(read_text(path)); }

std::string truth_json(const TrueGraph& truth, const std::vector<std::string>& names) {
  ordered_json j;
  j["format_version"] = 1;
  j["p"] = truth.p();
  j["variables"] = names;
  ordered_json edges = ordered_json::array();
  for (const Edge& e : truth.edges()) edges.push_back({e.a, e.b});
  j["edges"] = std::move(edges);
  return j.dump(2) + "\n";
}

TrueGraph parse_truth_json(const std::string& text) {
  const ordered_json j = parse_json(text, "truth");
  check_version(j, "truth");
  try {
    TrueGraph g(j.at("p").get<std::size_t>());
    for (const auto& e : j.at("edges")) g.add_edge(e.at(0).get<Node>(), e.at(1).get<Node>());
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("truth: malformed document (") + e.what() + ")");
  }
}

std::string instance_json(const SimulatedInstance& instance, const DesignPreset& preset) {
  ordered_json j;
  j["format_version"] = 1;
  j["design"] = to_string(instance.design);
  j["seed"] = instance.seed;
  j["n"] = instance.n;
  j["p"] = preset.precision.p;
  j["block_sizes"] = preset.precision.block_sizes;
  j["avg_degree_23"] = preset.precision.avg_degree_23;
  j["avg_degree_33"] = preset.precision.avg_degree_33;
  j["eig_min"] = preset.precision.eig_min;
  j["eig_max"] = preset.precision.eig_max;
  j["response"] = preset.nonlinear ? "nonlinear" : "linear";
  if (preset.nonlinear) j["snr"] = preset.snr;
  j["targets"] = {0};
  ordered_json edges = ordered_json::array();
  for (const Edge& e : instance.truth.edges()) edges.push_back({e.a, e.b});
  j["truth_edges"] = std::move(edges);
  return j.dump(2) + "\n";
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::string out;
  std::vector<std::string> fields(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) fields[static_cast<std::size_t>(k)] = format_double(m(i, k));
    out += csv_line(fields);
  }
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path + "': file not found or unreadable");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move '" + tmp.string() + "' to '" + path + "': " + ec.message());
  }
}

}  // namespace localgraph
