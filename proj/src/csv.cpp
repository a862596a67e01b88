// SPDX-License-Identifier: Apache-2.0
#include "reclab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "reclab/error.hpp"

namespace reclab {
namespace {

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

CsvCell::CsvCell(double value) : text_(format_real(value)) {}
CsvCell::CsvCell(long long value) : text_(std::to_string(value)) {}
CsvCell::CsvCell(std::string text) : text_(std::move(text)) {}
CsvCell::CsvCell(std::optional<double> value)
    : text_(value ? format_real(*value) : std::string()) {}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<CsvCell> row) {
  require(row.size() == header_.size(), ErrorCode::Precondition,
          "csv row width does not match header");
  std::vector<std::string> cells;
  cells.reserve(row.size());
  for (auto& cell : row) cells.push_back(cell.text());
  rows_.push_back(std::move(cells));
}

void CsvTable::write(std::ostream& out) const {
  auto emit = [&out](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << quote_if_needed(fields[i]);
    }
    out << "\r\n";
  };
  emit(header_);
  for (const auto& row : rows_) emit(row);
}

std::string CsvTable::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

void CsvTable::save(const std::string& path) const {
  std::ofstream file(path, std::ios::binary);
  if (!file) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  write(file);
  if (!file) fail(ErrorCode::Io, "write failed for " + path);
}

}  // namespace reclab
