#include "localgraph/qvalue.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "localgraph/error.hpp"
#include "localgraph/parallel.hpp"
#include "localgraph/random.hpp"

namespace localgraph {

namespace {

// Per-level selection decisions of one half-sample fit.
using SelectionMask = std::vector<std::vector<bool>>;  // level x feature

struct HalfSample {
  Eigen::MatrixXd x;  // standardized predictors
  Eigen::VectorXd y;  // standardized response
  std::vector<bool> constant;
  bool degenerate = false;  // response constant within the half
};

HalfSample make_half(const Eigen::MatrixXd& predictors, const Eigen::VectorXd& y, const std::vector<int>& rows) {
  const auto h = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd xh(h, predictors.cols());
  Eigen::VectorXd yh(h);
  for (Eigen::Index i = 0; i < h; ++i) {
    xh.row(i) = predictors.row(rows[static_cast<std::size_t>(i)]);
    yh[i] = y[rows[static_cast<std::size_t>(i)]];
  }
  HalfSample half;
  half.x = standardize_columns(xh, &half.constant);
  std::vector<bool> y_constant;
  half.y = standardize_columns(yh, &y_constant).col(0);
  half.degenerate = y_constant[0];
  return half;
}

Eigen::MatrixXd predictor_matrix(const DataMatrix& x, Node response, std::vector<Node>& features) {
  features.clear();
  for (Node k = 0; k < x.p(); ++k) {
    if (k != response) features.push_back(k);
  }
  Eigen::MatrixXd out(x.n(), features.size());
  for (std::size_t c = 0; c < features.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = x.values().col(features[c]);
  return out;
}

void check_profile_inputs(const DataMatrix& x, Node response, const std::vector<double>& levels, int B) {
  if (response >= x.p()) throw ArgumentError("profile: response index out of range");
  if (x.n() < 20) throw TooFewSamplesError("profile: need at least 20 samples, got " + std::to_string(x.n()));
  if (B < 20) throw ArgumentError("profile: need at least 20 subsample pairs");
  if (levels.empty()) throw ArgumentError("profile: empty grid");
}

// Shared subsampling driver: every half-fit returns a level x feature mask;
// counts are integers so the reduction is order-independent.
template <class Fit>
SelectionProfile run_profile(const DataMatrix& x, Node response, const std::vector<double>& levels, int B,
                             std::uint64_t seed, int threads, Fit&& fit) {
  check_profile_inputs(x, response, levels, B);
  SelectionProfile profile;
  profile.grid = levels;
  profile.response = response;
  profile.subsample_pairs = B;
  const Eigen::MatrixXd predictors = predictor_matrix(x, response, profile.features);
  const Eigen::VectorXd y = response_vector(x, response);
  const auto splits = complementary_splits(x.n(), B, seed);

  const std::size_t m = levels.size();
  const std::size_t f = profile.features.size();
  const std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
  std::vector<std::vector<long>> counts(workers, std::vector<long>(m * f, 0));

  parallel_for(2 * splits.size(), threads, [&](std::size_t task, std::size_t worker) {
    const auto& split = splits[task / 2];
    const HalfSample half = make_half(predictors, y, task % 2 == 0 ? split.first : split.second);
    if (half.degenerate) return;
    const SelectionMask mask = fit(half);
    auto& c = counts[worker];
    for (std::size_t l = 0; l < m; ++l) {
      for (std::size_t k = 0; k < f; ++k) {
        if (mask[l][k]) ++c[l * f + k];
      }
    }
  });

  std::vector<long> total(m * f, 0);
  for (const auto& c : counts) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += c[i];
  }
  const double fits = 2.0 * B;
  profile.freq.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(f));
  profile.avg_selected.assign(m, 0.0);
  for (std::size_t l = 0; l < m; ++l) {
    long level_total = 0;
    for (std::size_t k = 0; k < f; ++k) {
      const long c = total[l * f + k];
      profile.freq(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = static_cast<double>(c) / fits;
      level_total += c;
    }
    profile.avg_selected[l] = static_cast<double>(level_total) / fits;
  }
  return profile;
}

}  // namespace

const char* to_string(Selector selector) { return selector == Selector::kTree ? "tree" : "l1"; }

Selector parse_selector(const std::string& text) {
  if (text == "l1") return Selector::kL1;
  if (text == "tree") return Selector::kTree;
  throw ArgumentError("unknown selector '" + text + "' (expected \"l1\" or \"tree\")");
}

std::vector<double> default_tau_grid() { return {0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0}; }

void EstimatorConfig::validate() const {
  if (B < 20) throw ArgumentError("estimator: B must be at least 20");
  if (grid_size < 2) throw ArgumentError("estimator: grid_size must be at least 2");
  if (!(grid_ratio > 1.0)) throw ArgumentError("estimator: grid_ratio must exceed 1");
  if (tau_grid.empty()) throw ArgumentError("estimator: tau_grid is empty");
  for (double tau : tau_grid) {
    if (!(tau > 0.5 && tau <= 1.0)) throw ArgumentError("estimator: tau_grid values must lie in (0.5, 1]");
  }
  if (boost_rounds < 1 || max_depth < 1 || !(learning_rate > 0.0)) {
    throw ArgumentError("estimator: invalid boosting settings");
  }
  if (!(lasso_tol > 0.0)) throw ArgumentError("estimator: lasso_tol must be positive");
}

Eigen::VectorXd response_vector(const DataMatrix& x, Node response) {
  if (response >= x.p()) throw ArgumentError("response index out of range");
  Eigen::VectorXd y = x.values().col(response);
  if (x.kind(response) == ColumnKind::kBinary) {
    const double low = y.minCoeff();
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = y[i] == low ? -1.0 : 1.0;
  }
  return y;
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> complementary_splits(std::size_t n, int B,
                                                                                 std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t half = n / 2;
  std::vector<int> perm(n);
  std::vector<std::pair<std::vector<int>, std::vector<int>>> splits;
  splits.reserve(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> first(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(half));
    std::vector<int> second(perm.begin() + static_cast<std::ptrdiff_t>(half),
                            perm.begin() + static_cast<std::ptrdiff_t>(2 * half));
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    splits.emplace_back(std::move(first), std::move(second));
  }
  return splits;
}

std::vector<double> importance_thresholds(int m, double ratio) {
  if (m < 2) throw ArgumentError("importance_thresholds: need at least two levels");
  if (!(ratio > 1.0)) throw ArgumentError("importance_thresholds: ratio must exceed 1");
  std::vector<double> cuts(static_cast<std::size_t>(m));
  for (int l = 0; l < m; ++l) cuts[static_cast<std::size_t>(l)] = 0.5 * std::pow(ratio, -static_cast<double>(l) / (m - 1));
  cuts.front() = 0.5;
  cuts.back() = 0.5 / ratio;
  return cuts;
}

SelectionProfile selection_profile(const DataMatrix& x, Node response, const std::vector<double>& grid, int B,
                                   std::uint64_t seed, const LassoOptions& lasso, int threads) {
  for (std::size_t l = 0; l < grid.size(); ++l) {
    if (!(grid[l] > 0.0) || (l > 0 && !(grid[l] < grid[l - 1]))) {
      throw ArgumentError("selection_profile: grid must be positive and strictly decreasing");
    }
  }
  return run_profile(x, response, grid, B, seed, threads, [&](const HalfSample& half) {
    SelectionMask mask(grid.size(), std::vector<bool>(static_cast<std::size_t>(half.x.cols()), false));
    LassoPath path(half.x, half.y, half.constant);
    for (std::size_t l = 0; l < grid.size(); ++l) {
      path.solve(grid[l], lasso);
      const Eigen::VectorXd& beta = path.coefficients();
      for (Eigen::Index k = 0; k < beta.size(); ++k) mask[l][static_cast<std::size_t>(k)] = beta[k] != 0.0;
    }
    return mask;
  });
}

SelectionProfile tree_importance_profile(const DataMatrix& x, Node response, const std::vector<double>& thresholds,
                                         int B, std::uint64_t seed, const BoostingOptions& boosting, int threads) {
  for (std::size_t l = 0; l < thresholds.size(); ++l) {
    if (!(thresholds[l] >= 0.0 && thresholds[l] < 1.0) || (l > 0 && !(thresholds[l] < thresholds[l - 1]))) {
      throw ArgumentError("tree_importance_profile: thresholds must lie in [0,1) and strictly decrease");
    }
  }
  return run_profile(x, response, thresholds, B, seed, threads, [&](const HalfSample& half) {
    const Eigen::VectorXd shares = importance_shares(boosted_importance(half.x, half.y, boosting, half.constant));
    SelectionMask mask(thresholds.size(), std::vector<bool>(static_cast<std::size_t>(shares.size()), false));
    for (std::size_t l = 0; l < thresholds.size(); ++l) {
      for (Eigen::Index k = 0; k < shares.size(); ++k) mask[l][static_cast<std::size_t>(k)] = shares[k] > thresholds[l];
    }
    return mask;
  });
}

Eigen::VectorXd efp_scores(const SelectionProfile& profile, std::size_t p, const std::vector<double>& tau_grid) {
  if (tau_grid.empty()) throw ArgumentError("efp_scores: empty tau grid");
  for (double tau : tau_grid) {
    if (!(tau > 0.5 && tau <= 1.0)) throw ArgumentError("efp_scores: tau values must lie in (0.5, 1]");
  }
  if (p < 2) throw ArgumentError("efp_scores: need p >= 2");
  const double others = static_cast<double>(p - 1);
  const Eigen::Index m = profile.freq.rows();
  Eigen::VectorXd efp = Eigen::VectorXd::Constant(profile.freq.cols(), others);
  for (Eigen::Index k = 0; k < profile.freq.cols(); ++k) {
    for (Eigen::Index l = 0; l < m; ++l) {
      const double f = profile.freq(l, k);
      const double size = profile.avg_selected[static_cast<std::size_t>(l)];
      for (double tau : tau_grid) {
        if (f >= tau) efp[k] = std::min(efp[k], size * size / (others * (2.0 * tau - 1.0)));
      }
    }
  }
  return efp;
}

Eigen::VectorXd qvalues_from_efp(const Eigen::VectorXd& efp) {
  const auto count = static_cast<std::size_t>(efp.size());
  for (std::size_t i = 0; i < count; ++i) {
    if (!(efp[static_cast<Eigen::Index>(i)] >= 0.0)) throw ArgumentError("qvalues_from_efp: negative or NaN score");
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return efp[static_cast<Eigen::Index>(a)] < efp[static_cast<Eigen::Index>(b)];
  });

  // Tie blocks [start, end) in rank order; each block is scored at its last rank.
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  for (std::size_t i = 0; i < count;) {
    std::size_t j = i + 1;
    const double v = efp[static_cast<Eigen::Index>(order[i])];
    while (j < count && efp[static_cast<Eigen::Index>(order[j])] == v) ++j;
    blocks.emplace_back(i, j);
    i = j;
  }
  Eigen::VectorXd q(efp.size());
  double running = kInfinity;
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    const auto [start, end] = *it;
    const double raw = efp[static_cast<Eigen::Index>(order[start])] / static_cast<double>(end);
    running = std::min(running, raw);
    const double value = std::clamp(running, 0.0, 1.0);
    for (std::size_t r = start; r < end; ++r) q[static_cast<Eigen::Index>(order[r])] = value;
  }
  return q;
}

EfpQVector estimate_neighbor_qvalues(const DataMatrix& x, Node response, const EstimatorConfig& config) {
  config.validate();
  if (response >= x.p()) throw ArgumentError("estimate_neighbor_qvalues: response index out of range");
  const Eigen::VectorXd y = response_vector(x, response);
  const ColumnStats ys = column_stats(y);
  if (ys.sd <= 1e-12 * std::max(1.0, std::abs(ys.mean))) {
    throw DegenerateError("response '" + x.names()[response] + "' is constant");
  }

  SelectionProfile profile;
  if (config.selector == Selector::kL1) {
    std::vector<Node> features;
    const Eigen::MatrixXd predictors = standardize_columns(predictor_matrix(x, response, features));
    const Eigen::VectorXd ystd = (y.array() - ys.mean) / ys.sd;
    const auto grid = regularization_grid(predictors, ystd, config.grid_size, config.grid_ratio);
    profile = selection_profile(x, response, grid, config.B, config.seed, config.lasso(), config.threads);
  } else {
    profile = tree_importance_profile(x, response, importance_thresholds(config.grid_size, config.grid_ratio), config.B,
                                      config.seed, config.boosting(), config.threads);
  }

  EfpQVector out;
  out.response = response;
  out.features = profile.features;
  out.efp = efp_scores(profile, x.p(), config.tau_grid);
  out.q = qvalues_from_efp(out.efp);
  return out;
}

}  // namespace localgraph
