#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace localgraph {

// Comma-separated text with a header row. Fields may be quoted RFC 4180
// style; an empty field means "missing".
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Leading lines starting with '#' are skipped. Rows whose field count differs
// from the header raise IngestError.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

std::string csv_field(std::string_view field);
std::string csv_line(const std::vector<std::string>& fields);

// Shortest text that parses back to the same double.
std::string format_double(double value);
// Whole-field numeric parse; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

}  // namespace localgraph
