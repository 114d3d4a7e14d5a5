#pragma once

#include <string>
#include <vector>

#include "anomattr/core.hpp"

namespace anomattr::cli {

// Raw CSV: header plus string cells. Comma separated, no quoting, LF or
// CRLF line endings, blank lines ignored.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws DataError
  bool has_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& t);

// Parses a cell as a finite double; errors report row and column.
double parse_cell(const CsvTable& t, std::size_t row, std::size_t col);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

inline constexpr const char* kTargetColumn = "y";

// All non-target columns are features; the target column is required.
TestSet to_test_set(const CsvTable& t, const std::string& what);

// Target column is optional. Feature columns must match `names` in order.
ReferenceSet to_reference_set(const CsvTable& t, const std::vector<std::string>& names, RefRole role,
                              const std::string& what);

CsvTable from_test_set(const TestSet& ts);

}  // namespace anomattr::cli
