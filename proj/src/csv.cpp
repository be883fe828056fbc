#include "platoon/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace platoon::io {

std::size_t Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) {
      return i;
    }
  }
  throw MalformedLog("csv: no column named '" + name + "'");
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("csv: cannot open " + path.string() + " for writing");
  }
  for (const std::string& line : table.provenance) {
    out << "# " << line << "\n";
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << table.columns[i];
  }
  out << "\n";
  char buf[32];
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) {
      throw DimensionMismatch("csv: row width differs from header");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      if (i) {
        out << ',';
      }
      out << buf;
    }
    out << "\n";
  }
  if (!out) {
    throw IoError("csv: write failed for " + path.string());
  }
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("csv: cannot open " + path.string());
  }
  Table t;
  std::string line;
  bool have_header = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line.front() == '#') {
      std::string p = line.substr(1);
      if (!p.empty() && p.front() == ' ') {
        p.erase(0, 1);
      }
      t.provenance.push_back(p);
      continue;
    }
    std::istringstream cells(line);
    std::string cell;
    if (!have_header) {
      while (std::getline(cells, cell, ',')) {
        t.columns.push_back(cell);
      }
      have_header = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(t.columns.size());
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double x = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        throw MalformedLog("csv: non-numeric cell at line " + std::to_string(lineno));
      }
      row.push_back(x);
    }
    if (row.size() != t.columns.size()) {
      throw MalformedLog("csv: row width mismatch at line " + std::to_string(lineno));
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) {
    throw MalformedLog("csv: " + path.string() + " has no header row");
  }
  return t;
}

}  // namespace platoon::io
