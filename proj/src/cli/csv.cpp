#include "indep/csv.hpp"

#include "indep/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace indep::csv {
namespace {

// Splits one logical record starting at `pos`; quoted fields may span lines.
std::vector<std::string> split_record(std::string_view text, std::size_t& pos, std::size_t& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  const std::size_t start_line = line;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          field.push_back('"');
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line;
      break;
    } else if (c == '\r') {
      if (pos < text.size() && text[pos] == '\n') continue;
      ++line;
      break;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::ParseError, "unterminated quote starting on line " + std::to_string(start_line));
  fields.push_back(std::move(field));
  return fields;
}

bool blank(const std::vector<std::string>& fields) { return fields.size() == 1 && fields[0].empty(); }

}  // namespace

bool Table::has(std::string_view name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

std::size_t Table::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::MissingColumn, "column '" + std::string(name) + "' not found");
  return static_cast<std::size_t>(it - header.begin());
}

Table parse(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  Table t;
  std::size_t pos = 0, line = 1;
  if (text.empty()) throw Error(ErrorCode::ParseError, "empty input: a header row is required");
  t.header = split_record(text, pos, line);
  if (blank(t.header)) throw Error(ErrorCode::ParseError, "empty header row");
  for (std::size_t c = 0; c < t.header.size(); ++c)
    for (std::size_t d = 0; d < c; ++d)
      if (t.header[c] == t.header[d]) throw Error(ErrorCode::ParseError, "duplicate column '" + t.header[c] + "'");
  while (pos < text.size()) {
    const std::size_t here = line;
    auto fields = split_record(text, pos, line);
    if (blank(fields)) continue;
    if (fields.size() != t.header.size())
      throw Error(ErrorCode::ParseError, "line " + std::to_string(here) + ": expected " +
                                             std::to_string(t.header.size()) + " fields, found " +
                                             std::to_string(fields.size()));
    t.rows.push_back(std::move(fields));
    t.lines.push_back(here);
  }
  return t;
}

Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

double number(const Table& t, std::size_t row, std::size_t col) {
  const std::string& field = t.rows[row][col];
  const char* first = field.data();
  const char* last = first + field.size();
  if (first != last && *first == '+') ++first;  // from_chars rejects a leading '+'
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw Error(ErrorCode::ParseError, "line " + std::to_string(t.lines[row]) + ", column '" + t.header[col] +
                                           "': cannot parse '" + field + "' as a number");
  return v;
}

std::string format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace indep::csv
