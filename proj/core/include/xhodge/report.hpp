#pragma once

// Plain-text report output: key-value blocks and CSV tables. Numbers are printed with
// 17 significant digits so reruns can be compared byte for byte.

#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace xhodge {

using KeyValues = std::vector<std::pair<std::string, double>>;

std::string format_number(double v);

void write_key_values(std::ostream& os, const KeyValues& kv, const std::string& prefix = "");
/// Parses lines written by write_key_values; lines without " = " are skipped.
KeyValues read_key_values(std::istream& is);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  /// Cells are written verbatim; numeric cells should go through format_number.
  void add_row(std::vector<std::string> cells);
  void write(std::ostream& os) const;
  void write_file(const std::string& path) const;

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace xhodge
