// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace reclab {

/// Shortest-safe decimal rendering with 17 significant digits, '.' separator.
std::string format_real(double value);

/// One CSV cell: a number, an integer, text, or empty.
class CsvCell {
 public:
  CsvCell() = default;
  CsvCell(double value);
  CsvCell(long long value);
  CsvCell(int value) : CsvCell(static_cast<long long>(value)) {}
  CsvCell(unsigned value) : CsvCell(static_cast<long long>(value)) {}
  CsvCell(std::size_t value) : CsvCell(static_cast<long long>(value)) {}
  CsvCell(std::string text);
  CsvCell(const char* text) : CsvCell(std::string(text)) {}
  CsvCell(std::optional<double> value);

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

/// RFC-4180 table: CRLF line endings, quoting only where required.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<CsvCell> row);
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  void write(std::ostream& out) const;
  std::string str() const;
  void save(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace reclab
