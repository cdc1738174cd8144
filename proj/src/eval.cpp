#include "localgraph/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "localgraph/error.hpp"
#include "localgraph/lasso.hpp"
#include "localgraph/parallel.hpp"
#include "localgraph/random.hpp"

namespace localgraph {

namespace {

void mean_sd(const std::vector<double>& values, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (values.empty()) return;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
}

MethodSummary summarize(const std::string& method, const std::vector<TrialRecord>& records, int r_max, bool baseline) {
  MethodSummary s;
  s.method = method;
  for (int r = 0; r < r_max; ++r) {
    std::vector<double> tpr, fdp;
    for (const auto& rec : records) {
      tpr.push_back(baseline ? rec.baseline_tpr[static_cast<std::size_t>(r)] : rec.pfs_tpr[static_cast<std::size_t>(r)]);
      fdp.push_back(baseline ? rec.baseline_fdp[static_cast<std::size_t>(r)] : rec.pfs_fdp[static_cast<std::size_t>(r)]);
    }
    double m = 0, sd = 0;
    mean_sd(tpr, m, sd);
    s.tpr_mean.push_back(m);
    s.tpr_sd.push_back(sd);
    mean_sd(fdp, m, sd);
    s.fdp_mean.push_back(m);
    s.fdp_sd.push_back(sd);
  }
  return s;
}

struct PathSearch {
  const std::vector<std::vector<std::pair<Node, double>>>& adj;
  const TrueGraph& truth;
  double t;
  int radius;
  std::vector<bool> on_path;
  PathAudit audit;

  void extend(Node j, int hops, double sum, int false_edges) {
    bool extended = false;
    if (hops < radius) {
      for (const auto& [k, w] : adj[j]) {
        if (on_path[k] || sum + w > t) continue;
        extended = true;
        on_path[k] = true;
        extend(k, hops + 1, sum + w, false_edges + (truth.has_edge(j, k) ? 0 : 1));
        on_path[k] = false;
      }
    }
    if (!extended && hops > 0) {
      ++audit.paths;
      if (false_edges > 0) ++audit.false_paths;
    }
  }
};

std::string format_fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

const char* to_string(CombineRule rule) { return rule == CombineRule::kAnd ? "and" : "or"; }

CombineRule parse_combine(const std::string& text) {
  if (text == "or") return CombineRule::kOr;
  if (text == "and") return CombineRule::kAnd;
  throw ArgumentError("unknown combine rule '" + text + "' (expected \"or\" or \"and\")");
}

double LambdaRule::resolve(std::size_t n, std::size_t p) const {
  if (!(value >= 0.0) || !std::isfinite(value)) throw ArgumentError("lambda rule: value must be finite and nonnegative");
  if (kind == Kind::kFixed) return value;
  if (n < 2 || p < 2) throw ArgumentError("lambda rule: need n >= 2 and p >= 2");
  return value * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

EdgeSet nodewise_lasso_baseline(const DataMatrix& x, const LambdaRule& rule, CombineRule combine) {
  const Eigen::MatrixXd& v = x.values();
  if (!is_standardized(v)) throw ArgumentError("nodewise_lasso_baseline: data must be standardized");
  const std::size_t p = x.p();
  const double lambda = rule.resolve(x.n(), p);
  std::vector<std::vector<bool>> selected(p, std::vector<bool>(p, false));
  Eigen::MatrixXd others(v.rows(), v.cols() - 1);
  for (std::size_t j = 0; j < p; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    if (jj > 0) others.leftCols(jj) = v.leftCols(jj);
    if (jj + 1 < v.cols()) others.rightCols(v.cols() - jj - 1) = v.rightCols(v.cols() - jj - 1);
    const Eigen::VectorXd y = v.col(jj);
    LassoPath path(others, y);
    path.solve(lambda, LassoOptions{1e-12, 100000});
    const Eigen::VectorXd& beta = path.coefficients();
    for (Eigen::Index c = 0; c < beta.size(); ++c) {
      if (beta[c] != 0.0) selected[j][static_cast<std::size_t>(c < jj ? c : c + 1)] = true;
    }
  }
  EdgeSet out;
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = j + 1; k < p; ++k) {
      const bool keep = combine == CombineRule::kOr ? (selected[j][k] || selected[k][j])
                                                    : (selected[j][k] && selected[k][j]);
      if (keep) out.insert(Edge{j, k});
    }
  }
  return out;
}

double glasso_isolation_lambda(const DataMatrix& x, Node j) {
  if (j >= x.p()) throw ArgumentError("glasso_isolation_lambda: node out of range");
  const Eigen::MatrixXd& v = x.values();
  if (!is_standardized(v)) throw ArgumentError("glasso_isolation_lambda: data must be standardized");
  const Eigen::VectorXd row = v.transpose() * v.col(static_cast<Eigen::Index>(j)) / static_cast<double>(x.n());
  double best = 0.0;
  for (Eigen::Index k = 0; k < row.size(); ++k) {
    if (static_cast<Node>(k) != j) best = std::max(best, std::abs(row[k]));
  }
  return best;
}

PathAudit audit_path_bound(const LocalGraphEstimate& estimate, const TrueGraph& truth, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("audit_path_bound: t must lie in [0,1]");
  if (truth.p() != estimate.qmatrix.p()) throw ArgumentError("audit_path_bound: dimension mismatch");
  const auto adj = estimate.qmatrix.adjacency();
  PathSearch search{adj, truth, t, estimate.radius, std::vector<bool>(truth.p(), false), {}};
  search.audit.threshold = t;
  for (Node s : estimate.targets) {
    search.on_path[s] = true;
    search.extend(s, 0, 0.0, 0);
    search.on_path[s] = false;
  }
  return search.audit;
}

EdgeSet estimated_local_edges(const TrueGraph& estimate, const NodeSet& targets, int r) {
  return local_edge_set(estimate, targets, r);
}

void StudyConfig::validate() const {
  if (trials < 1) throw ArgumentError("study: trials must be at least 1");
  if (!(audit_threshold >= 0.0 && audit_threshold <= 1.0)) throw ArgumentError("study: audit threshold must lie in [0,1]");
  if (threads < 1) throw ArgumentError("study: threads must be at least 1");
  const DesignPreset p = preset();
  p.precision.validate();
  pfs.validate(p.precision.p);
  baseline_lambda.resolve(p.n, p.precision.p);
}

DesignPreset StudyConfig::preset() const {
  DesignPreset out = design_preset(design);
  if (n != 0) out.n = n;
  if (p != 0 && p != out.precision.p) {
    const std::size_t fixed = out.precision.block_sizes[0] + out.precision.block_sizes[1];
    if (p <= fixed) throw ArgumentError("study: p too small for the design's blocks");
    out.precision.p = p;
    out.precision.block_sizes[2] = p - fixed;
  }
  return out;
}

StudyConfig default_study(Design design) {
  StudyConfig c;
  c.design = design;
  c.pfs.rule = RecordRule::kMinimum;
  switch (design) {
    case Design::kLinear:
      c.pfs.r_max = 4;
      c.pfs.q_thresholds = {0.2, 0.1, 0.1, 0.1};
      c.pfs.q_path = 0.2;
      c.pfs.estimator.selector = Selector::kL1;
      break;
    case Design::kNonlinear:
      c.pfs.r_max = 4;
      c.pfs.q_thresholds = {0.2, 0.05, 0.05, 0.05};
      c.pfs.q_path = 0.2;
      c.pfs.estimator.selector = Selector::kTree;
      break;
    case Design::kFig1:
      c.pfs.r_max = 3;
      c.pfs.q_thresholds = {0.4, 0.4, 0.4};
      c.pfs.q_path = 0.4;
      c.pfs.estimator.selector = Selector::kL1;
      break;
  }
  c.audit_threshold = c.pfs.q_path;
  return c;
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  return derive_seed(seed, static_cast<std::uint64_t>(trial), 0x7472);
}

EvalReport run_study(const StudyConfig& config, const TrialCallback& on_trial) {
  config.validate();
  const DesignPreset preset = config.preset();
  const int r_max = config.pfs.r_max;
  const NodeSet targets{0};

  std::vector<TrialRecord> records(static_cast<std::size_t>(config.trials));
  parallel_for(records.size(), config.threads, [&](std::size_t t, std::size_t) {
    TrialRecord rec;
    rec.trial = static_cast<int>(t);
    rec.seed = trial_seed(config.seed, rec.trial);
    try {
      const SimulatedInstance inst = simulate(preset, config.design, rec.seed);
      PfsConfig pfs = config.pfs;
      pfs.estimator.seed = derive_seed(rec.seed, 1);
      if (config.threads > 1) pfs.threads = 1;
      const LocalGraphEstimate est = run_pfs(inst.samples, targets, pfs);
      const TrueGraph est_graph = est.graph();
      rec.estimated_nodes = est.estimated.size();

      std::optional<TrueGraph> base_graph;
      if (config.baseline_enabled) {
        const DataMatrix standardized(standardize_columns(inst.samples.values()), inst.samples.names(),
                                      inst.samples.kinds());
        base_graph = TrueGraph(inst.truth.p(),
                               nodewise_lasso_baseline(standardized, config.baseline_lambda, config.baseline_combine));
      }
      for (int r = 1; r <= r_max; ++r) {
        const EdgeSet truth_r = local_edge_set(inst.truth, targets, r);
        const EdgeSet est_r = estimated_local_edges(est_graph, targets, r);
        rec.pfs_tpr.push_back(local_tpr(est_r, truth_r));
        rec.pfs_fdp.push_back(local_fdp(est_r, truth_r));
        rec.pfs_edges.push_back(est_r.size());
        if (base_graph) {
          const EdgeSet base_r = estimated_local_edges(*base_graph, targets, r);
          rec.baseline_tpr.push_back(local_tpr(base_r, truth_r));
          rec.baseline_fdp.push_back(local_fdp(base_r, truth_r));
          rec.baseline_edges.push_back(base_r.size());
        }
      }
      rec.audit = audit_path_bound(est, inst.truth, config.audit_threshold);
    } catch (const Error& e) {
      throw Error("trial " + std::to_string(t) + ": " + e.what());
    }
    records[t] = std::move(rec);
    if (on_trial && config.threads == 1) on_trial(records[t]);
  });
  if (on_trial && config.threads > 1) {
    for (const auto& rec : records) on_trial(rec);
  }

  EvalReport report;
  report.design = config.design;
  report.trials = config.trials;
  report.r_max = r_max;
  report.seed = config.seed;
  report.pfs = summarize("pfs", records, r_max, false);
  report.has_baseline = config.baseline_enabled;
  if (report.has_baseline) report.baseline = summarize("nlasso", records, r_max, true);
  report.audit.threshold = config.audit_threshold;
  for (const auto& rec : records) {
    report.audit.paths += rec.audit.paths;
    report.audit.false_paths += rec.audit.false_paths;
  }
  report.records = std::move(records);
  return report;
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "# format_version=1\n";
  out << "radius,pfs_tpr_mean,pfs_tpr_sd,pfs_fdr_mean,pfs_fdr_sd";
  if (report.has_baseline) out << ",nlasso_tpr_mean,nlasso_tpr_sd,nlasso_fdr_mean,nlasso_fdr_sd";
  out << "\n";
  for (int r = 0; r < report.r_max; ++r) {
    const auto i = static_cast<std::size_t>(r);
    out << (r + 1) << ',' << format_fixed(report.pfs.tpr_mean[i]) << ',' << format_fixed(report.pfs.tpr_sd[i]) << ','
        << format_fixed(report.pfs.fdp_mean[i]) << ',' << format_fixed(report.pfs.fdp_sd[i]);
    if (report.has_baseline) {
      out << ',' << format_fixed(report.baseline.tpr_mean[i]) << ',' << format_fixed(report.baseline.tpr_sd[i]) << ','
          << format_fixed(report.baseline.fdp_mean[i]) << ',' << format_fixed(report.baseline.fdp_sd[i]);
    }
    out << "\n";
  }
  return out.str();
}

std::string report_json(const EvalReport& report) {
  using nlohmann::ordered_json;
  auto method = [](const MethodSummary& m) {
    ordered_json j;
    j["method"] = m.method;
    j["tpr_mean"] = m.tpr_mean;
    j["tpr_sd"] = m.tpr_sd;
    j["fdr_mean"] = m.fdp_mean;
    j["fdr_sd"] = m.fdp_sd;
    return j;
  };
  ordered_json j;
  j["format_version"] = 1;
  j["design"] = to_string(report.design);
  j["trials"] = report.trials;
  j["r_max"] = report.r_max;
  j["seed"] = report.seed;
  j["methods"] = ordered_json::array();
  j["methods"].push_back(method(report.pfs));
  if (report.has_baseline) j["methods"].push_back(method(report.baseline));
  j["path_audit"] = {{"threshold", report.audit.threshold},
                     {"paths", report.audit.paths},
                     {"false_paths", report.audit.false_paths},
                     {"false_fraction", report.audit.false_fraction()}};
  ordered_json trials = ordered_json::array();
  for (const auto& rec : report.records) {
    ordered_json t;
    t["trial"] = rec.trial;
    t["seed"] = rec.seed;
    t["estimated_nodes"] = rec.estimated_nodes;
    t["pfs_tpr"] = rec.pfs_tpr;
    t["pfs_fdr"] = rec.pfs_fdp;
    t["pfs_edges"] = rec.pfs_edges;
    if (report.has_baseline) {
      t["nlasso_tpr"] = rec.baseline_tpr;
      t["nlasso_fdr"] = rec.baseline_fdp;
      t["nlasso_edges"] = rec.baseline_edges;
    }
    t["audit_paths"] = rec.audit.paths;
    t["audit_false_paths"] = rec.audit.false_paths;
    trials.push_back(std::move(t));
  }
  j["trial_records"] = std::move(trials);
  return j.dump(2) + "\n";
}

}  // namespace localgraph
