#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "localgraph/data_matrix.hpp"
#include "localgraph/graph.hpp"
#include "localgraph/pfs.hpp"
#include "localgraph/simgen.hpp"

namespace localgraph {

enum class CombineRule { kOr, kAnd };

const char* to_string(CombineRule rule);
CombineRule parse_combine(const std::string& text);

// Penalty for the nodewise lasso baseline: either c * sqrt(log p / n) or a
// fixed lambda.
struct LambdaRule {
  enum class Kind { kScaled, kFixed };
  Kind kind = Kind::kScaled;
  double value = 0.5;

  double resolve(std::size_t n, std::size_t p) const;
};

// Nodewise lasso on a standardized matrix; node j's selections are the
// nonzero coefficients of its regression on all other columns.
EdgeSet nodewise_lasso_baseline(const DataMatrix& x, const LambdaRule& rule, CombineRule combine);

// max_{k != j} |S_jk| for the empirical covariance S of standardized data.
double glasso_isolation_lambda(const DataMatrix& x, Node j);

struct PathAudit {
  double threshold = 0.0;
  std::size_t paths = 0;        // maximal retained paths
  std::size_t false_paths = 0;  // paths containing at least one false edge

  double false_fraction() const {
    return paths == 0 ? 0.0 : static_cast<double>(false_paths) / static_cast<double>(paths);
  }
};

// Maximal simple paths of recorded edges starting at a target, with at most
// `radius` hops and q-sum <= t.
PathAudit audit_path_bound(const LocalGraphEstimate& estimate, const TrueGraph& truth, double t);

// Edges of the estimated radius-r local graph: recorded edges with an
// endpoint within r-1 hops of the targets in the estimated graph.
EdgeSet estimated_local_edges(const TrueGraph& estimate, const NodeSet& targets, int r);

struct StudyConfig {
  Design design = Design::kLinear;
  int trials = 30;
  std::size_t n = 0;  // 0: design default
  std::size_t p = 0;  // 0: design default
  PfsConfig pfs;
  bool baseline_enabled = true;
  LambdaRule baseline_lambda;
  CombineRule baseline_combine = CombineRule::kOr;
  double audit_threshold = 0.2;
  std::uint64_t seed = 0;
  int threads = 1;  // trials evaluated concurrently

  void validate() const;
  DesignPreset preset() const;
};

// PFS and audit settings used for each design in the reference studies.
StudyConfig default_study(Design design);

struct TrialRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<double> pfs_tpr;  // indexed by radius - 1
  std::vector<double> pfs_fdp;
  std::vector<std::size_t> pfs_edges;
  std::vector<double> baseline_tpr;
  std::vector<double> baseline_fdp;
  std::vector<std::size_t> baseline_edges;
  std::size_t estimated_nodes = 0;
  PathAudit audit;
};

struct MethodSummary {
  std::string method;
  std::vector<double> tpr_mean, tpr_sd, fdp_mean, fdp_sd;
};

struct EvalReport {
  Design design = Design::kLinear;
  int trials = 0;
  int r_max = 0;
  std::uint64_t seed = 0;
  std::vector<TrialRecord> records;
  MethodSummary pfs;
  bool has_baseline = false;
  MethodSummary baseline;
  PathAudit audit;  // pooled over trials
};

using TrialCallback = std::function<void(const TrialRecord&)>;

EvalReport run_study(const StudyConfig& config, const TrialCallback& on_trial = {});

// Seed of trial t.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

// Radius-by-method table.
std::string report_csv(const EvalReport& report);
// Full record including per-trial metrics.
std::string report_json(const EvalReport& report);

}  // namespace localgraph
