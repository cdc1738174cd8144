#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "localgraph/csv.hpp"
#include "localgraph/data_matrix.hpp"

namespace localgraph {

enum class MissingTargetPolicy { kDrop, kError };

struct IngestSpec {
  std::string source;
  std::vector<std::string> targets;
  std::map<std::string, ColumnKind> kinds;  // overrides; otherwise two-valued columns are binary
  double max_missing_fraction = 1.0;
  MissingTargetPolicy missing_targets = MissingTargetPolicy::kDrop;
  std::optional<double> dedup_correlation;  // unset: no deduplication
  bool standardize = false;
  std::vector<std::string> one_vs_rest;  // categorical columns expanded to one 0/1 column per level

  void validate() const;
};

struct CleaningSummary {
  std::size_t rows_in = 0;
  std::size_t rows_out = 0;
  std::size_t columns_in = 0;
  std::size_t columns_out = 0;
  std::size_t rows_missing_target = 0;
  std::size_t rows_missing_other = 0;
  std::vector<std::pair<std::string, std::string>> dropped_columns;  // name, reason
  std::vector<std::string> encoded;                                  // columns produced by one-vs-rest
};

struct IngestResult {
  DataMatrix data;
  CleaningSummary summary;
  std::vector<std::string> targets;  // target names after encoding
};

// Cleaning order: one-vs-rest encoding, column missingness filter, rows
// missing a target, rows with any other missing cell, correlation dedup
// (earlier column kept, targets never dropped), kinds, standardization.
IngestResult ingest(const IngestSpec& spec);
IngestResult ingest_table(const CsvTable& table, const IngestSpec& spec);

std::string summary_text(const CleaningSummary& summary);

// Header plus shortest round-trip values.
std::string dataset_csv(const DataMatrix& data);
// Reads a dataset written by dataset_csv without cleaning.
DataMatrix read_dataset(const std::string& path);

}  // namespace localgraph
