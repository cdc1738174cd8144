#include "localgraph/data_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "localgraph/error.hpp"

namespace localgraph {

const char* to_string(ColumnKind kind) {
  return kind == ColumnKind::kBinary ? "binary" : "continuous";
}

std::vector<std::string> default_names(std::size_t p) {
  std::vector<std::string> names;
  names.reserve(p);
  for (std::size_t j = 0; j < p; ++j) names.push_back("X" + std::to_string(j + 1));
  return names;
}

DataMatrix::DataMatrix(Eigen::MatrixXd values, std::vector<std::string> names, std::vector<ColumnKind> kinds)
    : values_(std::move(values)), names_(std::move(names)), kinds_(std::move(kinds)) {
  if (values_.rows() < 10) throw ArgumentError("DataMatrix: need at least 10 samples");
  if (values_.cols() < 2) throw ArgumentError("DataMatrix: need at least 2 variables");
  if (names_.size() != p() || kinds_.size() != p()) {
    throw ArgumentError("DataMatrix: names/kinds length does not match column count");
  }
  if (!values_.allFinite()) throw ArgumentError("DataMatrix: non-finite entry");
  for (std::size_t j = 0; j < p(); ++j) {
    if (kinds_[j] != ColumnKind::kBinary) continue;
    std::set<double> distinct;
    for (Eigen::Index i = 0; i < values_.rows() && distinct.size() <= 2; ++i) distinct.insert(values_(i, j));
    if (distinct.size() != 2) {
      throw ArgumentError("DataMatrix: binary column '" + names_[j] + "' does not take exactly two values");
    }
  }
}

DataMatrix::DataMatrix(Eigen::MatrixXd values)
    : DataMatrix(values, default_names(static_cast<std::size_t>(values.cols())),
                 std::vector<ColumnKind>(static_cast<std::size_t>(values.cols()), ColumnKind::kContinuous)) {}

Node DataMatrix::index_of(const std::string& name) const {
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (names_[j] == name) return j;
  }
  throw ArgumentError("unknown variable '" + name + "'");
}

ColumnStats column_stats(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double n = static_cast<double>(x.size());
  ColumnStats s;
  s.mean = x.sum() / n;
  s.sd = std::sqrt((x.array() - s.mean).square().sum() / n);
  return s;
}

Eigen::MatrixXd standardize_columns(const Eigen::Ref<const Eigen::MatrixXd>& x, std::vector<bool>* constant) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  if (constant) constant->assign(static_cast<std::size_t>(x.cols()), false);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    ColumnStats s = column_stats(x.col(j));
    // Relative cutoff: a column whose spread is rounding noise is constant.
    if (s.sd <= 1e-12 * std::max(1.0, std::abs(s.mean))) {
      out.col(j).setZero();
      if (constant) (*constant)[static_cast<std::size_t>(j)] = true;
    } else {
      out.col(j) = (x.col(j).array() - s.mean) / s.sd;
    }
  }
  return out;
}

bool is_standardized(const Eigen::Ref<const Eigen::MatrixXd>& x, double tol) {
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).sum() / n;
    const double var = x.col(j).squaredNorm() / n;
    if (std::abs(mean) > tol || std::abs(var - 1.0) > tol * 100) return false;
  }
  return true;
}

}  // namespace localgraph
