#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "localgraph/eval.hpp"
#include "localgraph/ingest.hpp"
#include "localgraph/pfs.hpp"

namespace localgraph {

// Keys of [pfs] and [estimator] that were given explicitly.
struct PfsOverrides {
  std::optional<int> r_max;
  std::optional<std::vector<double>> q_thresholds;
  std::optional<double> q_path;
  std::optional<RecordRule> rule;
  std::optional<int> threads;
  std::optional<double> intermodal_threshold;
  std::optional<std::vector<double>> intramodal_thresholds;

  std::optional<Selector> selector;
  std::optional<int> B;
  std::optional<int> grid_size;
  std::optional<double> grid_ratio;
  std::optional<std::vector<double>> tau_grid;
  std::optional<std::uint64_t> seed;
  std::optional<int> boost_rounds;
  std::optional<int> max_depth;
  std::optional<double> learning_rate;
  std::optional<double> lasso_tol;

  void apply(PfsConfig& config) const;
};

struct StudyOverrides {
  std::optional<Design> design;
  std::optional<int> trials;
  std::optional<std::size_t> n;
  std::optional<std::size_t> p;
  std::optional<bool> baseline;
  std::optional<double> baseline_c;
  std::optional<double> baseline_lambda;
  std::optional<CombineRule> baseline_combine;
  std::optional<double> audit_threshold;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

// Parsed TOML configuration with sections [pfs], [estimator], [ingest] and
// [study]. Node-specific settings are keyed by variable name and resolved
// against a dataset later.
struct RunConfig {
  PfsOverrides pfs;
  std::vector<std::string> targets;
  std::map<std::string, double> node_thresholds;
  std::map<std::string, std::string> groups;
  std::optional<IngestSpec> ingest;
  StudyOverrides study;
};

RunConfig parse_config(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::string& path);

PfsConfig resolve_pfs(const RunConfig& config, const DataMatrix& data);
StudyConfig resolve_study(const RunConfig& config, std::optional<Design> design);

}  // namespace localgraph
