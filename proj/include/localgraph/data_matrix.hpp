#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "localgraph/graph.hpp"

namespace localgraph {

enum class ColumnKind { kContinuous, kBinary };

const char* to_string(ColumnKind kind);

// n samples x p named variables. Validated on construction: all entries
// finite, n >= 10, p >= 2, binary columns take exactly two distinct values.
class DataMatrix {
 public:
  DataMatrix(Eigen::MatrixXd values, std::vector<std::string> names, std::vector<ColumnKind> kinds);
  // All-continuous matrix with names X1..Xp.
  explicit DataMatrix(Eigen::MatrixXd values);

  std::size_t n() const { return static_cast<std::size_t>(values_.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<ColumnKind>& kinds() const { return kinds_; }
  ColumnKind kind(Node j) const { return kinds_.at(j); }
  Node index_of(const std::string& name) const;

  bool operator==(const DataMatrix&) const = default;

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> names_;
  std::vector<ColumnKind> kinds_;
};

std::vector<std::string> default_names(std::size_t p);

// Population (1/n) moments, so a standardized column satisfies x'x/n = 1.
struct ColumnStats {
  double mean = 0.0;
  double sd = 0.0;
};
ColumnStats column_stats(const Eigen::Ref<const Eigen::VectorXd>& x);

// Centers and scales every column to mean 0, variance 1. Columns with zero
// variance are zeroed and reported through `constant` (when given).
Eigen::MatrixXd standardize_columns(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                    std::vector<bool>* constant = nullptr);

bool is_standardized(const Eigen::Ref<const Eigen::MatrixXd>& x, double tol = 1e-8);

}  // namespace localgraph
