#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "decmdp/physics/state.hpp"

namespace decmdp::io {

/// Numeric table with a header row; every value is written with 17
/// significant digits so a read returns the same doubles.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Throws ConfigError when the column is missing.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

void write_csv(const CsvTable& table, const std::filesystem::path& path);
/// Throws ConfigError on unreadable files, ragged rows or bad numbers.
CsvTable read_csv(const std::filesystem::path& path);

/// `x,<field names>` with one row per cell.
CsvTable snapshot_table(const physics::State1D& u, const physics::EquationSpec& spec);

/// `<run_id>_t<step>.csv`
std::string snapshot_name(const std::string& run_id, std::size_t step);

}  // namespace decmdp::io
