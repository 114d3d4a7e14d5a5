#include "table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "anomattr/errors.hpp"

namespace anomattr::cli {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  for (auto& c : out) {
    while (!c.empty() && (c.back() == ' ' || c.back() == '\t')) c.pop_back();
    std::size_t k = 0;
    while (k < c.size() && (c[k] == ' ' || c[k] == '\t')) ++k;
    c.erase(0, k);
  }
  return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw DataError("missing column '" + name + "'");
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& h : header) {
    if (h == name) return true;
  }
  return false;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto cells = split(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(t.header.size()) + " cells, found " + std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty() || t.rows.empty()) throw UsageError("'" + path + "' has no data rows");
  return t;
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path + "'");
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  emit(t.header);
  for (const auto& r : t.rows) emit(r);
  if (!out) throw UsageError("failed writing '" + path + "'");
}

double parse_cell(const CsvTable& t, std::size_t row, std::size_t col) {
  const std::string& s = t.rows.at(row)[col];
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw DataError("row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1) + " ('" +
                    t.header[col] + "'): not a finite number: '" + s + "'");
  }
  return v;
}

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

TestSet to_test_set(const CsvTable& t, const std::string& what) {
  if (!t.has_column(kTargetColumn)) throw DataError(what + " has no target column 'y'");
  const std::size_t ycol = t.column(kTargetColumn);
  std::vector<std::string> names;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c != ycol) names.push_back(t.header[c]);
  }
  if (names.empty()) throw DataError(what + " has no feature columns");
  std::vector<Sample> samples;
  samples.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Sample s;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      const double v = parse_cell(t, r, c);
      if (c == ycol) {
        s.y = v;
      } else {
        s.x.push_back(v);
      }
    }
    samples.push_back(std::move(s));
  }
  return TestSet(std::move(samples), std::move(names));
}

ReferenceSet to_reference_set(const CsvTable& t, const std::vector<std::string>& names, RefRole role,
                              const std::string& what) {
  const bool has_y = t.has_column(kTargetColumn);
  std::vector<std::size_t> cols;
  for (const auto& n : names) {
    if (!t.has_column(n)) throw DataError(what + " lacks feature column '" + n + "'");
    cols.push_back(t.column(n));
  }
  const std::size_t expected = names.size() + (has_y ? 1 : 0);
  if (t.header.size() != expected) {
    throw DataError(what + " header does not match the test set's features");
  }
  std::vector<RefPoint> pts;
  pts.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    RefPoint p;
    for (std::size_t c : cols) p.x.push_back(parse_cell(t, r, c));
    if (has_y) p.y = parse_cell(t, r, t.column(kTargetColumn));
    pts.push_back(std::move(p));
  }
  return ReferenceSet(std::move(pts), role);
}

CsvTable from_test_set(const TestSet& ts) {
  CsvTable t;
  t.header = ts.names();
  t.header.push_back(kTargetColumn);
  for (const auto& s : ts.samples()) {
    std::vector<std::string> row;
    for (double v : s.x) row.push_back(format_double(v));
    row.push_back(format_double(s.y));
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace anomattr::cli
