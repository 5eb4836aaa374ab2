#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace indep::csv {

/// Comma-separated table with a required header row. Fields may be wrapped in
/// double quotes ("" escapes a quote). Numbers use '.' and no separators.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based source line of each row, for error messages.
  std::vector<std::size_t> lines;

  bool has(std::string_view name) const;
  /// Throws MissingColumn.
  std::size_t column(std::string_view name) const;
};

/// Throws FileNotFound or ParseError.
Table read_file(const std::string& path);
Table parse(std::string_view text);

/// Strict decimal parse of one field; throws ParseError naming row and column.
double number(const Table& t, std::size_t row, std::size_t col);

/// 17 significant digits, so the text reads back as the same double.
std::string format(double v);

}  // namespace indep::csv
