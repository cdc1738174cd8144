#include "localgraph/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "localgraph/data_matrix.hpp"
#include "localgraph/error.hpp"

namespace localgraph {

namespace {

inline double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

}  // namespace

LassoPath::LassoPath(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<bool> excluded)
    : x_(&x),
      y_(&y),
      excluded_(std::move(excluded)),
      beta_(Eigen::VectorXd::Zero(x.cols())),
      residual_(y),
      inv_n_(1.0 / static_cast<double>(x.rows())) {
  if (x.rows() != y.size()) throw ArgumentError("LassoPath: row count mismatch");
  if (excluded_.empty()) excluded_.assign(static_cast<std::size_t>(x.cols()), false);
  if (excluded_.size() != static_cast<std::size_t>(x.cols())) {
    throw ArgumentError("LassoPath: exclusion mask length mismatch");
  }
}

double LassoPath::sweep(double lambda, bool active_only) {
  double max_change = 0.0;
  const Eigen::MatrixXd& x = *x_;
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    if (excluded_[static_cast<std::size_t>(k)]) continue;
    const double old = beta_[k];
    if (active_only && old == 0.0) continue;
    const double z = x.col(k).dot(residual_) * inv_n_ + old;
    const double updated = soft_threshold(z, lambda);
    const double delta = updated - old;
    if (delta != 0.0) {
      residual_.noalias() -= delta * x.col(k);
      beta_[k] = updated;
      max_change = std::max(max_change, delta * delta);
    }
  }
  return max_change;
}

int LassoPath::solve(double lambda, const LassoOptions& options) {
  if (!(lambda >= 0.0)) throw ArgumentError("lasso: lambda must be nonnegative");
  int sweeps = 0;
  auto exhausted = [&]() {
    if (sweeps < options.max_sweeps) return;
    const double residual = kkt_residual(*x_, *y_, beta_, lambda);
    throw ConvergenceError("lasso: no convergence after " + std::to_string(sweeps) +
                               " sweeps (KKT residual " + std::to_string(residual) + ")",
                           residual);
  };
  // Columns have unit variance, so delta^2 is the drop in fitted variance a
  // coordinate move causes; compare it with the response's mean square.
  const double scale = std::max(y_->squaredNorm() * inv_n_, std::numeric_limits<double>::min());
  const double tol = options.tol * scale;
  // Zero is optimal for lambda >= lambda_max. The relative slack absorbs
  // rounding differences between matrix and column products.
  if (beta_.isZero(0.0)) {
    const Eigen::VectorXd corr = (x_->transpose() * *y_).cwiseAbs() * inv_n_;
    double top = 0.0;
    for (Eigen::Index k = 0; k < corr.size(); ++k) {
      if (!excluded_[static_cast<std::size_t>(k)]) top = std::max(top, corr[k]);
    }
    if (lambda >= top * (1.0 - 1e-12)) return 0;
  }
  // Full sweeps decide the active set; inner sweeps polish it.
  while (true) {
    double change = sweep(lambda, false);
    ++sweeps;
    if (change < tol) return sweeps;
    exhausted();
    do {
      change = sweep(lambda, true);
      ++sweeps;
      exhausted();
    } while (change >= tol);
  }
}

Eigen::VectorXd soft_threshold_solve(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                     const Eigen::Ref<const Eigen::VectorXd>& y, double lambda,
                                     const LassoOptions& options) {
  if (x.rows() != y.size()) throw ArgumentError("soft_threshold_solve: row count mismatch");
  if (x.rows() < 2) throw ArgumentError("soft_threshold_solve: need at least two rows");
  if (!is_standardized(x)) throw ArgumentError("soft_threshold_solve: design columns are not standardized");
  const ColumnStats ys = column_stats(y);
  if (std::abs(ys.mean) > 1e-8 * std::max(1.0, ys.sd)) {
    throw ArgumentError("soft_threshold_solve: response is not centered");
  }
  const Eigen::MatrixXd xm = x;
  const Eigen::VectorXd ym = y;
  LassoPath path(xm, ym);
  path.solve(lambda, options);
  return path.coefficients();
}

double lasso_objective(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                       const Eigen::Ref<const Eigen::VectorXd>& beta, double lambda) {
  const double n = static_cast<double>(x.rows());
  return (y - x * beta).squaredNorm() / (2.0 * n) + lambda * beta.lpNorm<1>();
}

double kkt_residual(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Eigen::Ref<const Eigen::VectorXd>& beta, double lambda) {
  const double n = static_cast<double>(x.rows());
  const Eigen::VectorXd gradient = x.transpose() * (y - x * beta) / n;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < beta.size(); ++k) {
    double violation;
    if (beta[k] > 0.0) {
      violation = std::abs(gradient[k] - lambda);
    } else if (beta[k] < 0.0) {
      violation = std::abs(gradient[k] + lambda);
    } else {
      violation = std::max(0.0, std::abs(gradient[k]) - lambda);
    }
    worst = std::max(worst, violation);
  }
  return worst;
}

double lambda_max(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  if (x.rows() != y.size()) throw ArgumentError("lambda_max: row count mismatch");
  return (x.transpose() * y).cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
}

std::vector<double> regularization_grid(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                        const Eigen::Ref<const Eigen::VectorXd>& y, int m, double ratio) {
  if (m < 2) throw ArgumentError("regularization_grid: need at least two levels");
  if (!(ratio > 1.0)) throw ArgumentError("regularization_grid: ratio must exceed 1");
  const ColumnStats ys = column_stats(y);
  if (ys.sd <= 1e-12 * std::max(1.0, std::abs(ys.mean))) {
    throw DegenerateError("regularization_grid: response is constant");
  }
  const double top = lambda_max(x, y);
  if (!(top > 0.0) || !std::isfinite(top)) {
    throw DegenerateError("regularization_grid: response is uncorrelated with every column");
  }
  std::vector<double> grid(static_cast<std::size_t>(m));
  for (int l = 0; l < m; ++l) {
    grid[static_cast<std::size_t>(l)] = top * std::pow(ratio, -static_cast<double>(l) / (m - 1));
  }
  grid.front() = top;
  grid.back() = top / ratio;
  return grid;
}

}  // namespace localgraph
