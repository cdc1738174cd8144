// Acceptance suite: one PASS/FAIL line per criterion plus a timing note for a
// 3000 x 165 CSV run. Exits 0 when every failing criterion is listed through
// --known-red (comma-separated numbers), 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "localgraph/cli.hpp"
#include "localgraph/eval.hpp"
#include "localgraph/graph.hpp"
#include "localgraph/ingest.hpp"
#include "localgraph/lasso.hpp"
#include "localgraph/qvalue.hpp"
#include "localgraph/random.hpp"
#include "localgraph/serialize.hpp"
#include "localgraph/simgen.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace localgraph;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kStudySeed = 20240601;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Scratch {
  fs::path root;
  Scratch() {
    root = fs::temp_directory_path() / ("localgraph_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
  std::string operator/(const std::string& name) const { return (root / name).string(); }
};

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int status = cli_dispatch(args, o, e);
  if (out) *out = o.str();
  if (status != 0) std::fprintf(stderr, "  cli %s exited %d: %s", args.front().c_str(), status, e.str().c_str());
  return status;
}

// Studies shared by criteria 1 to 3.
struct Studies {
  EvalReport linear;
  EvalReport nonlinear;
  EvalReport fig1;
  double linear_seconds = 0.0;
  double nonlinear_seconds = 0.0;
};

EvalReport run_timed(Design design, bool baseline, double* seconds) {
  StudyConfig c = default_study(design);
  c.trials = 30;
  c.seed = kStudySeed;
  c.baseline_enabled = baseline;
  const auto start = std::chrono::steady_clock::now();
  EvalReport r = run_study(c);
  *seconds = seconds_since(start);
  return r;
}

Outcome criterion1(const Studies& s) {
  const auto& m = s.linear.pfs;
  const double tpr = m.tpr_mean[0], fdr = m.fdp_mean[0], fdr2 = m.fdp_mean[1];
  const bool pass = tpr >= 0.70 && tpr <= 1.0 && fdr >= 0.04 && fdr <= 0.28 && fdr2 <= 0.25 &&
                    s.linear_seconds <= 1800.0;
  std::ostringstream d;
  d << "linear study, 30 trials: radius-1 TPR " << fmt("%.3f", tpr) << " (want [0.70,1]), FDR " << fmt("%.3f", fdr)
    << " (want [0.04,0.28]); radius-2 FDR " << fmt("%.3f", fdr2) << " (want <= 0.25); "
    << fmt("%.0f", s.linear_seconds) << " s";
  if (s.linear.has_baseline) {
    d << "; nodewise lasso radius-1 TPR " << fmt("%.3f", s.linear.baseline.tpr_mean[0]) << " FDR "
      << fmt("%.3f", s.linear.baseline.fdp_mean[0]);
  }
  return {pass, d.str()};
}

Outcome criterion2(const Studies& s) {
  const double tpr = s.nonlinear.pfs.tpr_mean[0], fdr = s.nonlinear.pfs.fdp_mean[0];
  // Both combination rules of the nodewise lasso on the very same instances.
  const StudyConfig c = default_study(Design::kNonlinear);
  double worst_baseline = 0.0;
  std::ostringstream base;
  for (CombineRule rule : {CombineRule::kOr, CombineRule::kAnd}) {
    double sum = 0.0;
    for (int t = 0; t < 30; ++t) {
      const SimulatedInstance inst = simulate(c.preset(), Design::kNonlinear, trial_seed(kStudySeed, t));
      const DataMatrix z(standardize_columns(inst.samples.values()));
      const TrueGraph g(z.p(), nodewise_lasso_baseline(z, c.baseline_lambda, rule));
      sum += local_tpr(local_edge_set(g, {0}, 1), local_edge_set(inst.truth, {0}, 1));
    }
    const double mean = sum / 30.0;
    worst_baseline = std::max(worst_baseline, mean);
    base << " " << to_string(rule) << " " << fmt("%.3f", mean);
  }
  const bool pass = tpr >= 0.55 && fdr <= 0.35 && worst_baseline <= 0.15;
  std::ostringstream d;
  d << "nonlinear study, tree selector, 30 trials: radius-1 TPR " << fmt("%.3f", tpr) << " (want >= 0.55), FDR "
    << fmt("%.3f", fdr) << " (want <= 0.35); nodewise lasso radius-1 TPR" << base.str() << " (want <= 0.15); "
    << fmt("%.0f", s.nonlinear_seconds) << " s";
  return {pass, d.str()};
}

Outcome criterion3(const Studies& s) {
  const double lin = s.linear.audit.false_fraction();
  const double fig = s.fig1.audit.false_fraction();
  const bool pass = lin <= 0.30 && fig <= 0.50;
  std::ostringstream d;
  d << "false-path fraction: linear at t=0.2 " << fmt("%.3f", lin) << " of " << s.linear.audit.paths
    << " paths (want <= 0.30); fig1 at t=0.4 " << fmt("%.3f", fig) << " of " << s.fig1.audit.paths
    << " paths (want <= 0.50)";
  return {pass, d.str()};
}

Outcome criterion4() {
  std::mt19937_64 rng(404);
  std::size_t set_mismatches = 0;
  for (int g = 0; g < 30; ++g) {
    std::uniform_int_distribution<std::size_t> size(5, 40);
    const std::size_t p = size(rng);
    const EdgeSet edges = oracle::random_edges(p, 3.0 / static_cast<double>(p), rng);
    const TrueGraph graph(p, edges);
    const NodeSet targets = oracle::random_targets(p, rng);
    for (int r = 1; r <= 4; ++r) {
      if (ball(graph, targets, r) != oracle::ball(p, edges, targets, r)) ++set_mismatches;
      if (local_edge_set(graph, targets, r) != oracle::local_edges(p, edges, targets, r)) ++set_mismatches;
    }
  }
  std::size_t path_mismatches = 0;
  std::uniform_int_distribution<std::size_t> size(2, 12);
  std::uniform_int_distribution<int> radius(1, 4);
  std::uniform_real_distribution<double> weight(0.0, 0.5), thresh(0.0, 1.0), density(0.2, 0.7);
  for (int g = 0; g < 200; ++g) {
    const std::size_t p = size(rng);
    QMatrix q(p);
    for (const Edge& e : oracle::random_edges(p, density(rng), rng)) q.set(e.a, e.b, weight(rng));
    oracle::Weights w(p, std::vector<double>(p, 1.0));
    for (Node a = 0; a < p; ++a) {
      for (Node b = 0; b < p; ++b) w[a][b] = a == b ? 1.0 : q(a, b);
    }
    const NodeSet targets = oracle::random_targets(p, rng);
    const int r = radius(rng);
    const std::vector<double> want = oracle::lightest(w, targets, r);
    for (Node j = 0; j < p; ++j) {
      if (targets.count(j)) continue;
      const double got = lightest_path_distance(q, targets, j, r);
      if (std::isinf(want[j]) ? !std::isinf(got) : std::abs(got - want[j]) > 1e-12) ++path_mismatches;
    }
    LocalGraphEstimate est;
    est.qmatrix = q;
    est.targets = targets;
    est.radius = r;
    const double t = thresh(rng);
    const oracle::Weights pruned = oracle::prune(w, targets, r, t);
    const QMatrix got = prune(est, t).qmatrix;
    for (Node a = 0; a < p; ++a) {
      for (Node b = 0; b < p; ++b) {
        if (a != b && got(a, b) != pruned[a][b]) ++path_mismatches;
      }
    }
  }
  std::ostringstream d;
  d << "oracles: ball/local edge set mismatches " << set_mismatches << " over 30 graphs; lightest path/prune mismatches "
    << path_mismatches << " over 200 weighted graphs";
  return {set_mismatches == 0 && path_mismatches == 0, d.str()};
}

Outcome criterion5() {
  std::ifstream in(std::string(LOCALGRAPH_FIXTURES) + "/fdp_panels.json");
  const auto doc = nlohmann::json::parse(in);
  bool pass = true;
  std::ostringstream d;
  d << "FDP arithmetic of the two hypothetical graphs:";
  for (const auto& panel : doc["panels"]) {
    const auto p = panel["p"].get<std::size_t>();
    EdgeSet est, truth;
    for (const auto& e : panel["estimated"]) est.insert(Edge::make(e[0].get<Node>() - 1, e[1].get<Node>() - 1));
    for (const auto& e : panel["truth"]) truth.insert(Edge::make(e[0].get<Node>() - 1, e[1].get<Node>() - 1));
    const double full = local_fdp(est, truth);
    pass = pass && std::abs(full - panel["expected"]["full"].get<double>()) < 1e-15;
    d << " " << panel["name"].get<std::string>() << " full " << fmt("%g", full) << ", radius-1";
    const TrueGraph eg(p, est), tg(p, truth);
    for (const auto& [label, value] : panel["expected"]["radius1"].items()) {
      const NodeSet v0{static_cast<Node>(std::stoul(label) - 1)};
      const double fdp = local_fdp(local_edge_set(eg, v0, 1), local_edge_set(tg, v0, 1));
      pass = pass && fdp == value.get<double>();
      d << " X" << label << "=" << fmt("%g", fdp);
    }
    d << ";";
  }
  d << " (want full 0.1 and 0.9; radius-1 0, 0.5, 1)";
  return {pass, d.str()};
}

Outcome criterion6() {
  std::mt19937_64 rng(606);
  std::normal_distribution<double> g;
  double worst_kkt = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 40 + trial * 3, p = 5 + trial % 30;
    Eigen::MatrixXd raw(n, p);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) raw(i, j) = g(rng) + (j > 0 ? 0.5 * raw(i, j - 1) : 0.0);
    }
    const Eigen::MatrixXd x = standardize_columns(raw);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = x(i, 0) - x(i, p - 1) + g(rng);
    y.array() -= y.mean();
    const double lambda = lambda_max(x, y) * std::pow(0.85, trial % 25);
    worst_kkt = std::max(worst_kkt, kkt_residual(x, y, soft_threshold_solve(x, y, lambda), lambda));
  }

  const int n = 100, p = 8;
  Eigen::MatrixXd raw(n, p + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= p; ++j) raw(i, j) = g(rng);
  }
  raw.col(0).setOnes();
  const Eigen::MatrixXd basis = Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ() * Eigen::MatrixXd::Identity(n, p + 1);
  const Eigen::MatrixXd x = basis.rightCols(p) * std::sqrt(static_cast<double>(n));
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = g(rng);
  y.array() -= y.mean();
  const Eigen::VectorXd z = x.transpose() * y / n;
  double worst_closed = 0.0;
  for (double lambda : {0.0, 0.02, 0.05, 0.1, 0.2}) {
    const Eigen::VectorXd beta = soft_threshold_solve(x, y, lambda);
    for (int j = 0; j < p; ++j) {
      const double expected = std::copysign(std::max(std::abs(z[j]) - lambda, 0.0), z[j]);
      worst_closed = std::max(worst_closed, std::abs(beta[j] - expected));
    }
  }

  bool zero = true;
  for (double factor : {1.0, 1.5, 10.0}) {
    const double lambda = factor * lambda_max(x, y);
    zero = zero && (soft_threshold_solve(x, y, lambda).array() == 0.0).all();
  }
  std::ostringstream d;
  d << "lasso: worst KKT residual " << fmt("%.2e", worst_kkt) << " over 50 problems (want <= 1e-6); orthonormal error "
    << fmt("%.2e", worst_closed) << " (want <= 1e-8); lambda >= lambda_max gives exact zeros: " << (zero ? "yes" : "no");
  return {worst_kkt <= 1e-6 && worst_closed <= 1e-8 && zero, d.str()};
}

Outcome criterion7() {
  double eig_error = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    PrecisionSpec spec = design_preset(Design::kLinear).precision;
    spec.seed = seed;
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(make_precision(spec), Eigen::EigenvaluesOnly).eigenvalues();
    eig_error = std::max({eig_error, std::abs(ev.minCoeff() - 0.01), std::abs(ev.maxCoeff() - 10.0)});
  }

  PrecisionSpec small;
  small.p = 10;
  small.block_sizes = {1, 4, 5};
  small.avg_degree_23 = 2.0;
  small.avg_degree_33 = 2.0;
  small.seed = 77;
  const Eigen::MatrixXd theta = make_precision(small);
  const DataMatrix x = sample_gaussian(theta, 50000, 78);
  const Eigen::MatrixXd centered = x.values().rowwise() - x.values().colwise().mean();
  const Eigen::MatrixXd s = centered.transpose() * centered / static_cast<double>(x.n() - 1);
  const Eigen::MatrixXd sigma = theta.inverse();
  const double cov_error = (s - sigma).norm() / sigma.norm();

  DesignPreset nl = design_preset(Design::kNonlinear);
  nl.n = 10000;
  PrecisionSpec nl_spec = nl.precision;
  nl_spec.seed = 91;
  const DataMatrix base = sample_gaussian(make_precision(nl_spec), nl.n, 92);
  const NodeSet neighbors{1, 2, 3, 4};
  const Eigen::VectorXd clean =
      apply_nonlinear_response(base, 0, neighbors, std::numeric_limits<double>::infinity(), 93).values().col(0);
  const Eigen::VectorXd noisy = apply_nonlinear_response(base, 0, neighbors, nl.snr, 93).values().col(0);
  const Eigen::VectorXd noise = noisy - clean;
  const double snr = (clean.array() - clean.mean()).square().sum() / (noise.array() - noise.mean()).square().sum();

  std::ostringstream d;
  d << "simulator: eigenvalue extreme error " << fmt("%.1e", eig_error) << " (want <= 1e-8); covariance relative error "
    << fmt("%.4f", cov_error) << " at n=50000 (want <= 0.05); SNR " << fmt("%.3f", snr)
    << " at n=10000 (want [3.2,4.8])";
  return {eig_error <= 1e-8 && cov_error <= 0.05 && snr >= 3.2 && snr <= 4.8, d.str()};
}

Outcome criterion8() {
  const EstimatorConfig config = default_study(Design::kLinear).pfs.estimator;
  std::vector<int> counts;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SimulatedInstance inst = simulate(Design::kLinear, 5000 + seed);
    Eigen::MatrixXd v = inst.samples.values();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(v.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const Eigen::VectorXd y = v.col(0);
    for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, 0) = y[order[static_cast<std::size_t>(i)]];
    EstimatorConfig c = config;
    c.seed = derive_seed(seed, 8);
    const EfpQVector q = estimate_neighbor_qvalues(DataMatrix(v), 0, c);
    counts.push_back(static_cast<int>((q.q.array() <= 0.2).count()));
  }
  std::vector<int> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[24] + sorted[25]);
  std::ostringstream d;
  d << "null calibration: median #{q <= 0.2} " << fmt("%g", median) << " over 50 permuted responses (want <= 1); max "
    << sorted.back() << ", mean " << fmt("%.2f", std::accumulate(counts.begin(), counts.end(), 0.0) / 50.0);
  return {median <= 1.0, d.str()};
}

bool replay_identical(const std::string& manifest, const std::string& dest, std::string* report) {
  std::string out;
  const int status = cli({"replay", "--manifest", manifest, "--out", dest}, &out);
  *report += out;
  return status == 0 && out.find("differs") == std::string::npos && out.find("identical") != std::string::npos;
}

Outcome criterion9(const Scratch& dir) {
  std::ofstream(dir / "pfs.toml") << "[pfs]\ntargets = [\"X1\"]\nr_max = 2\nq_thresholds = [0.4, 0.4]\nq_path = 0.4\n"
                                     "[estimator]\nB = 30\n";
  std::ofstream(dir / "study.toml") << "[estimator]\nB = 20\ngrid_size = 10\n";
  std::string log;
  bool ok = cli({"simulate", "--design", "fig1", "--seed", "7", "--out", dir / "sim"}) == 0;
  ok = ok && replay_identical(dir / "sim/manifest.json", dir / "sim_replay", &log);
  ok = ok && cli({"pfs", "--data", dir / "sim/data.csv", "--config", dir / "pfs.toml", "--seed", "3", "--out",
                  dir / "pfs"}) == 0;
  ok = ok && replay_identical(dir / "pfs/manifest.json", dir / "pfs_replay", &log);
  const std::vector<std::string> study{"study", "--design", "fig1", "--trials", "3", "--seed", "7", "--config",
                                       dir / "study.toml", "--out"};
  auto with_out = [&](const std::string& out) {
    std::vector<std::string> a = study;
    a.push_back(out);
    return a;
  };
  ok = ok && cli(with_out(dir / "study_a")) == 0 && cli(with_out(dir / "study_b")) == 0;
  ok = ok && read_text(dir / "study_a/report.csv") == read_text(dir / "study_b/report.csv") &&
       read_text(dir / "study_a/report.json") == read_text(dir / "study_b/report.json");
  ok = ok && replay_identical(dir / "study_a/manifest.json", dir / "study_replay", &log);
  std::size_t files = 0;
  for (std::size_t at = log.find("identical"); at != std::string::npos; at = log.find("identical", at + 1)) ++files;
  std::ostringstream d;
  d << "replay: simulate, pfs and study reruns from manifests byte-identical over " << files
    << " output files; repeated study identical: " << (ok ? "yes" : "no");
  return {ok, d.str()};
}

// 3000 x 165 synthetic CSV with a binary column and scattered missing cells,
// cleaned with ingest and estimated with pfs through the CLI.
Outcome csv_note(const Scratch& dir) {
  DesignPreset preset = design_preset(Design::kLinear);
  preset.precision.p = 165;
  preset.precision.block_sizes = {1, 4, 160};
  preset.n = 3000;
  const SimulatedInstance inst = simulate(preset, Design::kLinear, 31);
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u;
  std::vector<std::string> names = inst.samples.names();
  names.back() = "flag";
  std::ostringstream csv;
  csv << csv_line(names);
  const Eigen::MatrixXd& v = inst.samples.values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    std::vector<std::string> row;
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (j == v.cols() - 1) {
        row.push_back(v(i, j) > 0 ? "1" : "0");
      } else if (j > 0 && u(rng) < 0.001) {
        row.emplace_back();
      } else {
        row.push_back(format_double(v(i, j)));
      }
    }
    csv << csv_line(row);
  }
  std::ofstream(dir / "wide.csv") << csv.str();
  std::ofstream(dir / "wide.toml") << "[pfs]\nr_max = 3\nq_thresholds = [0.2, 0.2, 0.2]\nq_path = 0.2\n"
                                      "[ingest]\ntargets = [\"X1\"]\ndedup_correlation = 0.999\nstandardize = true\n";
  const auto start = std::chrono::steady_clock::now();
  bool ok = cli({"ingest", "--data", dir / "wide.csv", "--config", dir / "wide.toml", "--out", dir / "clean.csv"}) == 0;
  ok = ok && cli({"pfs", "--data", dir / "clean.csv", "--config", dir / "wide.toml", "--out", dir / "wide_est"}) == 0;
  const double secs = seconds_since(start);
  std::size_t rows = 0, nodes = 0;
  if (ok) {
    rows = read_dataset(dir / "clean.csv").n();
    nodes = read_estimate(dir / "wide_est/estimate.json").estimated.size();
  }
  std::ostringstream d;
  d << "3000 x 165 synthetic CSV: ingest + pfs (r_max 3) finished in " << fmt("%.1f", secs) << " s single-threaded ("
    << rows << " rows kept, " << nodes << " neighborhoods; want <= 1200 s)";
  return {ok && secs <= 1200.0, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known_red;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--known-red=", 0) == 0) {
      std::istringstream list(arg.substr(12));
      for (std::string item; std::getline(list, item, ',');) known_red.insert(std::stoi(item));
    } else {
      std::fprintf(stderr, "usage: acceptance [--known-red=N[,N...]]\n");
      return 2;
    }
  }

  const auto start = std::chrono::steady_clock::now();
  Scratch scratch;
  Studies studies;
  double fig1_seconds = 0.0;
  studies.linear = run_timed(Design::kLinear, true, &studies.linear_seconds);
  studies.nonlinear = run_timed(Design::kNonlinear, false, &studies.nonlinear_seconds);
  studies.fig1 = run_timed(Design::kFig1, false, &fig1_seconds);

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, [&] { return criterion1(studies); }},
      {2, [&] { return criterion2(studies); }},
      {3, [&] { return criterion3(studies); }},
      {4, criterion4},
      {5, criterion5},
      {6, criterion6},
      {7, criterion7},
      {8, criterion8},
      {9, [&] { return criterion9(scratch); }},
  };
  std::vector<int> failed;
  for (const auto& [id, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) failed.push_back(id);
  }
  Outcome note;
  try {
    note = csv_note(scratch);
  } catch (const std::exception& e) {
    note = {false, std::string("threw: ") + e.what()};
  }
  std::printf("%s note: %s\n", note.pass ? "PASS" : "FAIL", note.detail.c_str());
  std::printf("total %.0f s\n", seconds_since(start));

  bool unexpected = !note.pass;
  for (int id : failed) {
    if (known_red.count(id)) {
      std::printf("criterion %d is a documented known failure\n", id);
    } else {
      unexpected = true;
    }
  }
  for (int id : known_red) {
    if (std::find(failed.begin(), failed.end(), id) == failed.end()) {
      std::printf("criterion %d is listed as known red but passed\n", id);
    }
  }
  return unexpected ? 1 : 0;
}
