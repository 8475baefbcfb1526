#include "xhodge/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "xhodge/errors.hpp"

namespace xhodge {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0 into 0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_key_values(std::ostream& os, const KeyValues& kv, const std::string& prefix) {
  for (const auto& [k, v] : kv) os << prefix << k << " = " << format_number(v) << '\n';
}

KeyValues read_key_values(std::istream& is) {
  KeyValues kv;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    try {
      kv.emplace_back(line.substr(0, eq), std::stod(line.substr(eq + 3)));
    } catch (const std::logic_error&) {
      throw IoError("bad key-value line '" + line + "'");
    }
  }
  return kv;
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size())
    throw ContractError("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(columns_.size()));
  rows_.push_back(std::move(cells));
}

void CsvTable::write(std::ostream& os) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

void CsvTable::write_file(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  write(f);
  if (!f) throw IoError("write failed for " + path);
}

}  // namespace xhodge
