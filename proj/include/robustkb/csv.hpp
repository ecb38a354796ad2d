#pragma once

#include <initializer_list>
#include <string>
#include <vector>

namespace robustkb {

/// Numbers are printed with 12 significant digits; +-inf as the literal
/// "inf"/"-inf". NaN is rejected with NumericalError.
std::string format_number(double v);
double parse_number(const std::string& cell);

struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::initializer_list<double> values);
  void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }

  /// Index of a named column; throws ConfigError if absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> numeric_column(const std::string& name) const;
};

void write_csv(const std::string& path, const CsvTable& table);
/// Throws MissingInputError when the file does not exist.
CsvTable read_csv(const std::string& path);

}  // namespace robustkb
