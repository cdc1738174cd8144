#include "localgraph/boosting.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "localgraph/error.hpp"

namespace localgraph {

namespace {

struct NodeStats {
  double sum = 0.0;
  int count = 0;
  // best split found so far
  double gain = 0.0;
  Eigen::Index feature = -1;
  double threshold = 0.0;
};

}  // namespace

Eigen::VectorXd boosted_importance(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const BoostingOptions& options,
                                   const std::vector<bool>& excluded) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n != y.size()) throw ArgumentError("boosted_importance: row count mismatch");
  if (options.rounds < 1 || options.max_depth < 1 || !(options.learning_rate > 0.0)) {
    throw ArgumentError("boosted_importance: invalid boosting options");
  }
  if (!excluded.empty() && excluded.size() != static_cast<std::size_t>(p)) {
    throw ArgumentError("boosted_importance: exclusion mask length mismatch");
  }
  auto is_excluded = [&](Eigen::Index k) { return !excluded.empty() && excluded[static_cast<std::size_t>(k)]; };

  // Presorted sample order per column; ties keep sample order.
  std::vector<std::vector<int>> order(static_cast<std::size_t>(p));
  for (Eigen::Index k = 0; k < p; ++k) {
    if (is_excluded(k)) continue;
    auto& o = order[static_cast<std::size_t>(k)];
    o.resize(static_cast<std::size_t>(n));
    std::iota(o.begin(), o.end(), 0);
    std::stable_sort(o.begin(), o.end(), [&](int a, int b) { return x(a, k) < x(b, k); });
  }

  Eigen::VectorXd importance = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd fitted = Eigen::VectorXd::Constant(n, y.mean());
  Eigen::VectorXd gradient(n);
  std::vector<int> node_of(static_cast<std::size_t>(n));
  std::vector<double> run_sum;
  std::vector<int> run_count;
  std::vector<double> last_value;

  for (int round = 0; round < options.rounds; ++round) {
    gradient = y - fitted;
    std::fill(node_of.begin(), node_of.end(), 0);
    int node_count = 1;

    for (int depth = 0; depth < options.max_depth; ++depth) {
      std::vector<NodeStats> stats(static_cast<std::size_t>(node_count));
      for (Eigen::Index i = 0; i < n; ++i) {
        NodeStats& s = stats[static_cast<std::size_t>(node_of[static_cast<std::size_t>(i)])];
        s.sum += gradient[i];
        ++s.count;
      }
      run_sum.assign(stats.size(), 0.0);
      run_count.assign(stats.size(), 0);
      last_value.assign(stats.size(), 0.0);

      for (Eigen::Index k = 0; k < p; ++k) {
        if (is_excluded(k)) continue;
        std::fill(run_sum.begin(), run_sum.end(), 0.0);
        std::fill(run_count.begin(), run_count.end(), 0);
        for (int i : order[static_cast<std::size_t>(k)]) {
          const auto nd = static_cast<std::size_t>(node_of[static_cast<std::size_t>(i)]);
          const double v = x(i, k);
          NodeStats& s = stats[nd];
          if (run_count[nd] > 0 && v > last_value[nd]) {
            const double nl = run_count[nd];
            const double nr = s.count - run_count[nd];
            const double sl = run_sum[nd];
            const double sr = s.sum - sl;
            const double gain = sl * sl / nl + sr * sr / nr - s.sum * s.sum / s.count;
            if (gain > s.gain) {
              s.gain = gain;
              s.feature = k;
              s.threshold = 0.5 * (last_value[nd] + v);
            }
          }
          run_sum[nd] += gradient[i];
          ++run_count[nd];
          last_value[nd] = v;
        }
      }

      // Split nodes with a real improvement; children of node c are 2c, 2c+1.
      bool any_split = false;
      for (const NodeStats& s : stats) {
        if (s.feature >= 0 && s.gain > 1e-12 * std::max(1.0, s.sum * s.sum / s.count)) {
          importance[s.feature] += s.gain;
          any_split = true;
        }
      }
      if (!any_split) break;
      for (Eigen::Index i = 0; i < n; ++i) {
        auto& nd = node_of[static_cast<std::size_t>(i)];
        const NodeStats& s = stats[static_cast<std::size_t>(nd)];
        const bool split = s.feature >= 0 && s.gain > 1e-12 * std::max(1.0, s.sum * s.sum / s.count);
        const int right = split && x(i, s.feature) > s.threshold ? 1 : 0;
        nd = 2 * nd + right;
      }
      node_count *= 2;
    }

    // Leaf values are mean gradients.
    std::vector<double> leaf_sum(static_cast<std::size_t>(node_count), 0.0);
    std::vector<int> leaf_count(static_cast<std::size_t>(node_count), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto nd = static_cast<std::size_t>(node_of[static_cast<std::size_t>(i)]);
      leaf_sum[nd] += gradient[i];
      ++leaf_count[nd];
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto nd = static_cast<std::size_t>(node_of[static_cast<std::size_t>(i)]);
      fitted[i] += options.learning_rate * leaf_sum[nd] / leaf_count[nd];
    }
  }
  return importance;
}

Eigen::VectorXd importance_shares(const Eigen::VectorXd& importance) {
  const double total = importance.sum();
  if (!(total > 0.0)) return Eigen::VectorXd::Zero(importance.size());
  return importance / total;
}

}  // namespace localgraph
