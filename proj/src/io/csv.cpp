#include "decmdp/io/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "decmdp/errors.hpp"
#include "decmdp/io/keyvalue.hpp"

namespace decmdp::io {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return c;
  }
  throw ConfigError("csv: no column '" + name + "'");
}

std::vector<double> CsvTable::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

void write_csv(const CsvTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
  out << '\n';
  for (const auto& r : table.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_exact(r[c]);
    out << '\n';
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty csv");
  for (auto h : split(line)) t.header.emplace_back(h);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": wrong number of columns");
    }
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto [ptr, ec] = std::from_chars(cells[c].data(), cells[c].data() + cells[c].size(), row[c]);
      if (ec != std::errc() || ptr != cells[c].data() + cells[c].size()) {
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + std::string(cells[c]) + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable snapshot_table(const physics::State1D& u, const physics::EquationSpec& spec) {
  CsvTable t;
  t.header.push_back("x");
  for (auto& n : physics::field_names(spec)) t.header.push_back(n);
  t.rows.reserve(u.cells);
  for (std::size_t j = 0; j < u.cells; ++j) {
    std::vector<double> row{u.x_center(j)};
    for (std::size_t f = 0; f < u.fields; ++f) row.push_back(u(f, j));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string snapshot_name(const std::string& run_id, std::size_t step) {
  return run_id + "_t" + std::to_string(step) + ".csv";
}

}  // namespace decmdp::io
