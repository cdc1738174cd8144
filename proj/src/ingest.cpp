#include "localgraph/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "localgraph/error.hpp"

namespace localgraph {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct Column {
  std::string name;
  std::vector<double> values;  // NaN = missing
  bool target = false;
  std::size_t source_column = 0;  // 1-based position in the file
};

bool missing(double v) { return std::isnan(v); }

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

double abs_correlation(const std::vector<double>& a, const std::vector<double>& b, const std::vector<std::size_t>& rows) {
  const double n = static_cast<double>(rows.size());
  double ma = 0, mb = 0;
  for (std::size_t r : rows) {
    ma += a[r];
    mb += b[r];
  }
  ma /= n;
  mb /= n;
  double saa = 0, sbb = 0, sab = 0;
  for (std::size_t r : rows) {
    const double da = a[r] - ma, db = b[r] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return 0.0;
  return std::abs(sab) / std::sqrt(saa * sbb);
}

}  // namespace

void IngestSpec::validate() const {
  if (!(max_missing_fraction >= 0.0 && max_missing_fraction <= 1.0)) {
    throw ArgumentError("ingest: max_missing_fraction must lie in [0,1]");
  }
  if (dedup_correlation && !(*dedup_correlation > 0.0 && *dedup_correlation <= 1.0)) {
    throw ArgumentError("ingest: dedup_correlation must lie in (0,1]");
  }
}

IngestResult ingest(const IngestSpec& spec) {
  spec.validate();
  return ingest_table(read_csv(spec.source), spec);
}

IngestResult ingest_table(const CsvTable& table, const IngestSpec& spec) {
  spec.validate();
  CleaningSummary summary;
  summary.rows_in = table.rows.size();
  summary.columns_in = table.header.size();

  std::set<std::string> seen;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c].empty()) throw IngestError("empty column name", 1, c + 1);
    if (!seen.insert(table.header[c]).second) throw IngestError("duplicate column '" + table.header[c] + "'", 1, c + 1);
  }
  for (const auto& t : spec.targets) {
    if (!seen.count(t)) throw IngestError("missing target column '" + t + "'");
  }
  for (const auto& c : spec.one_vs_rest) {
    if (!seen.count(c)) throw IngestError("one-vs-rest column '" + c + "' not found");
  }
  const std::set<std::string> encode(spec.one_vs_rest.begin(), spec.one_vs_rest.end());
  const std::set<std::string> target_set(spec.targets.begin(), spec.targets.end());

  std::vector<Column> columns;
  std::vector<std::string> targets;
  const std::size_t rows = table.rows.size();
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    const bool is_target = target_set.count(name) > 0;
    if (encode.count(name)) {
      std::set<std::string> levels;
      for (const auto& row : table.rows) {
        if (!row[c].empty()) levels.insert(row[c]);
      }
      if (levels.size() < 2) throw IngestError("one-vs-rest column '" + name + "' has fewer than two levels", 0, c + 1);
      for (const auto& level : levels) {
        Column col{name + "=" + level, std::vector<double>(rows), is_target, c + 1};
        for (std::size_t r = 0; r < rows; ++r) {
          const std::string& cell = table.rows[r][c];
          col.values[r] = cell.empty() ? kMissing : (cell == level ? 1.0 : 0.0);
        }
        if (seen.count(col.name)) throw IngestError("encoded column '" + col.name + "' clashes with an existing column");
        summary.encoded.push_back(col.name);
        if (is_target) targets.push_back(col.name);
        columns.push_back(std::move(col));
      }
      continue;
    }
    Column col{name, std::vector<double>(rows), is_target, c + 1};
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string& cell = table.rows[r][c];
      if (cell.empty()) {
        col.values[r] = kMissing;
        continue;
      }
      const auto v = parse_double(cell);
      if (!v || !std::isfinite(*v)) throw IngestError("unparseable cell '" + cell + "'", r + 2, c + 1);
      col.values[r] = *v;
    }
    if (is_target) targets.push_back(name);
    columns.push_back(std::move(col));
  }
  // Keep the caller's target order where no encoding happened.
  if (spec.one_vs_rest.empty()) targets = spec.targets;

  // Column missingness.
  std::vector<Column> kept;
  for (auto& col : columns) {
    const auto count = static_cast<std::size_t>(std::count_if(col.values.begin(), col.values.end(), missing));
    const double fraction = rows == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(rows);
    if (!col.target && fraction > spec.max_missing_fraction) {
      summary.dropped_columns.emplace_back(col.name, "missing fraction " + fixed3(fraction) + " exceeds " +
                                                         fixed3(spec.max_missing_fraction));
      continue;
    }
    kept.push_back(std::move(col));
  }
  columns = std::move(kept);

  // Rows.
  std::vector<std::size_t> row_index;
  for (std::size_t r = 0; r < rows; ++r) {
    bool target_missing = false, other_missing = false;
    for (const auto& col : columns) {
      if (!missing(col.values[r])) continue;
      (col.target ? target_missing : other_missing) = true;
    }
    if (target_missing) {
      if (spec.missing_targets == MissingTargetPolicy::kError) throw IngestError("missing target value", r + 2);
      ++summary.rows_missing_target;
      continue;
    }
    if (other_missing) {
      ++summary.rows_missing_other;
      continue;
    }
    row_index.push_back(r);
  }
  if (row_index.empty()) throw IngestError("no rows left after cleaning");

  // Correlation dedup.
  if (spec.dedup_correlation) {
    const double threshold = *spec.dedup_correlation;
    std::vector<bool> drop(columns.size(), false);
    std::vector<std::size_t> survivors;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      bool keep_j = true;
      for (std::size_t idx = 0; idx < survivors.size(); ++idx) {
        const std::size_t i = survivors[idx];
        const double corr = abs_correlation(columns[i].values, columns[j].values, row_index);
        if (!(corr > threshold) || (columns[i].target && columns[j].target)) continue;
        if (!columns[j].target) {
          summary.dropped_columns.emplace_back(columns[j].name, "correlation " + fixed3(corr) + " with " + columns[i].name);
          keep_j = false;
          break;
        }
        summary.dropped_columns.emplace_back(columns[i].name, "correlation " + fixed3(corr) + " with target " + columns[j].name);
        drop[i] = true;
        survivors.erase(survivors.begin() + static_cast<std::ptrdiff_t>(idx));
        --idx;
      }
      if (keep_j) {
        survivors.push_back(j);
      } else {
        drop[j] = true;
      }
    }
    std::vector<Column> deduped;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (!drop[j]) deduped.push_back(std::move(columns[j]));
    }
    columns = std::move(deduped);
  }

  for (const auto& [name, kind] : spec.kinds) {
    (void)kind;
    const bool present = std::any_of(columns.begin(), columns.end(), [&](const Column& c) { return c.name == name; });
    const bool dropped = std::any_of(summary.dropped_columns.begin(), summary.dropped_columns.end(),
                                     [&](const auto& d) { return d.first == name; });
    if (!present && !dropped) throw IngestError("kind override for unknown column '" + name + "'");
  }

  const auto n = static_cast<Eigen::Index>(row_index.size());
  const auto p = static_cast<Eigen::Index>(columns.size());
  if (p < 2) throw IngestError("fewer than two columns left after cleaning");
  if (n < 10) throw IngestError("fewer than ten rows left after cleaning");
  Eigen::MatrixXd values(n, p);
  std::vector<std::string> names;
  std::vector<ColumnKind> kinds;
  for (Eigen::Index j = 0; j < p; ++j) {
    const Column& col = columns[static_cast<std::size_t>(j)];
    std::set<double> distinct;
    for (Eigen::Index i = 0; i < n; ++i) {
      values(i, j) = col.values[row_index[static_cast<std::size_t>(i)]];
      if (distinct.size() < 3) distinct.insert(values(i, j));
    }
    ColumnKind kind = distinct.size() == 2 ? ColumnKind::kBinary : ColumnKind::kContinuous;
    if (auto it = spec.kinds.find(col.name); it != spec.kinds.end()) kind = it->second;
    if (kind == ColumnKind::kBinary && distinct.size() != 2) {
      throw IngestError("column '" + col.name + "' declared binary but does not take exactly two values", 0,
                        col.source_column);
    }
    if (kind == ColumnKind::kContinuous && spec.standardize) {
      const ColumnStats s = column_stats(values.col(j));
      if (s.sd > 0.0) {
        values.col(j) = (values.col(j).array() - s.mean) / s.sd;
      } else {
        values.col(j).setZero();
      }
    }
    names.push_back(col.name);
    kinds.push_back(kind);
  }
  summary.rows_out = static_cast<std::size_t>(n);
  summary.columns_out = static_cast<std::size_t>(p);
  return IngestResult{DataMatrix(std::move(values), std::move(names), std::move(kinds)), std::move(summary),
                      std::move(targets)};
}

std::string summary_text(const CleaningSummary& summary) {
  std::ostringstream out;
  out << "rows: " << summary.rows_in << " in, " << summary.rows_out << " out (" << summary.rows_missing_target
      << " missing a target, " << summary.rows_missing_other << " with other missing cells)\n";
  out << "columns: " << summary.columns_in << " in, " << summary.columns_out << " out\n";
  for (const auto& name : summary.encoded) out << "encoded: " << name << "\n";
  for (const auto& [name, reason] : summary.dropped_columns) out << "dropped: " << name << " (" << reason << ")\n";
  return out.str();
}

std::string dataset_csv(const DataMatrix& data) {
  std::string out = csv_line(data.names());
  const Eigen::MatrixXd& v = data.values();
  std::vector<std::string> fields(data.p());
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) fields[static_cast<std::size_t>(j)] = format_double(v(i, j));
    out += csv_line(fields);
  }
  return out;
}

DataMatrix read_dataset(const std::string& path) {
  IngestSpec spec;
  spec.source = path;
  return ingest(spec).data;
}

}  // namespace localgraph
