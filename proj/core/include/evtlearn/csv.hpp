#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evtlearn/dataset.hpp"

namespace evtlearn {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Strict double parse of a whole field; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

/// Which header names hold the real target and the +-1 label. All other columns are covariates.
struct CsvSchema {
  std::optional<std::string> target;
  std::optional<std::string> label;
};

/// Comma-separated, header row, '.' decimal. Errors name the 1-based data row and column:
/// "row 2: expected 2 fields", "no data rows", "missing column 'Trans'".
Dataset parse_csv(std::istream& in, const CsvSchema& schema = {});
Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Writes x1..xd (or the stored column names), then target and label columns when present.
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// Joins fields with commas and terminates the line with LF.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace evtlearn
