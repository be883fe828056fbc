#ifndef PLATOON_CSV_HPP
#define PLATOON_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "platoon/errors.hpp"

namespace platoon::io {

/// Numeric table with a header row. Provenance lines are emitted as leading
/// `# ` comments and recovered on read.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> provenance;

  std::size_t column_index(const std::string& name) const;
};

void write_csv(const std::filesystem::path& path, const Table& table);
Table read_csv(const std::filesystem::path& path);

}  // namespace platoon::io

#endif
