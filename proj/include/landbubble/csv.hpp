#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "landbubble/errors.hpp"

namespace landbubble::io {

// 12 significant digits, locale-independent.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Writes via a temporary file in the same directory, then renames, so
// partially written outputs are never observed.
inline void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file: " + tmp.string());
    out << contents;
    if (!out) throw ConfigError("failed writing output file: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw ConfigError("failed to move output into place: " + target.string());
}

class CsvBuilder {
 public:
  explicit CsvBuilder(const std::string& header) { out_ << header << "\n"; }

  CsvBuilder& cell(double v) {
    sep();
    row_ << format_number(v);
    return *this;
  }
  CsvBuilder& cell(const std::string& v) {
    sep();
    row_ << v;
    return *this;
  }
  CsvBuilder& cell(int v) {
    sep();
    row_ << v;
    return *this;
  }
  CsvBuilder& cell(long long v) {
    sep();
    row_ << v;
    return *this;
  }

  void end_row() {
    out_ << row_.str() << "\n";
    row_.str("");
    first_ = true;
  }

  std::string str() const { return out_.str(); }
  void write(const std::string& path) const { write_file_atomic(path, out_.str()); }

 private:
  void sep() {
    if (!first_) row_ << ",";
    first_ = false;
  }
  std::ostringstream out_;
  std::ostringstream row_;
  bool first_ = true;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  static CsvTable read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open csv file: " + path);
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::string cell;
      std::istringstream row(line);
      while (std::getline(row, cell, ',')) cells.push_back(cell);
      if (first) {
        table.header = std::move(cells);
        first = false;
      } else {
        table.rows.push_back(std::move(cells));
      }
    }
    if (first) throw ConfigError("empty csv file: " + path);
    return table;
  }

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }

  std::vector<double> numbers(const std::string& name) const {
    int col = column(name);
    if (col < 0) throw ConfigError("csv column not found: " + name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
      if (static_cast<std::size_t>(col) >= row.size())
        throw ConfigError("csv row too short for column " + name);
      out.push_back(std::stod(row[static_cast<std::size_t>(col)]));
    }
    return out;
  }
};

}  // namespace landbubble::io
