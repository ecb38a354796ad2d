#include "robustkb/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "robustkb/error.hpp"

namespace robustkb {

std::string format_number(double v)
{
  if (std::isnan(v)) throw NumericalError("refusing to write NaN to CSV");
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double parse_number(const std::string& cell)
{
  if (cell == "inf") return HUGE_VAL;
  if (cell == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') throw ConfigError("malformed number in CSV: '" + cell + "'");
  return v;
}

void CsvTable::add_row(std::initializer_list<double> values)
{
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  rows.push_back(std::move(cells));
}

std::size_t CsvTable::column(const std::string& name) const
{
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  throw ConfigError("CSV column '" + name + "' not found");
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const
{
  const std::size_t k = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(parse_number(row.at(k)));
  return out;
}

void write_csv(const std::string& path, const CsvTable& table)
{
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  auto write_line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out << ',';
      out << cells[k];
    }
    out << '\n';
  };
  write_line(table.header);
  for (const auto& row : table.rows) write_line(row);
}

CsvTable read_csv(const std::string& path)
{
  if (!std::filesystem::exists(path)) throw MissingInputError("missing input file: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open input file: " + path);
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV file: " + path);
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != table.header.size()) throw ConfigError("ragged row in CSV file: " + path);
    table.rows.push_back(std::move(cells));
  }
  return table;
}

}  // namespace robustkb
