#include "stawg/csv.hpp"

#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <system_error>

#include "stawg/error.hpp"

namespace stawg::csv {

std::string format(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec != std::errc()) throw DomainError(ErrorKind::io, "csv: cannot format value");
  return std::string(buf, res.ptr);
}

void write_header(std::ostream& out, std::initializer_list<const char*> columns) {
  bool first = true;
  for (const char* c : columns) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  out << '\n';
}

void write_row(std::ostream& out, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format(values[i]);
  }
  out << '\n';
}

void write_row(std::ostream& out, std::initializer_list<double> values) {
  write_row(out, std::span<const double>(values.begin(), values.size()));
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DomainError(ErrorKind::io, "csv: missing column '" + name + "'");
}

std::vector<double> Table::values(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r[c]);
  return v;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(',', start);
    std::string cell = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t b = 0;
    while (b < cell.size() && cell[b] == ' ') ++b;
    cells.push_back(cell.substr(b));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return cells;
}

}  // namespace

Table read(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw DomainError(ErrorKind::io, "csv: empty input");
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size())
      throw DomainError(ErrorKind::io, "csv: wrong column count on line " + std::to_string(lineno));
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const char* b = cells[i].data();
      const char* e = b + cells[i].size();
      const auto res = std::from_chars(b, e, row[i]);
      if (res.ec != std::errc() || res.ptr != e)
        throw DomainError(ErrorKind::io, "csv: bad number on line " + std::to_string(lineno));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

TextTable read_text(std::istream& in) {
  TextTable t;
  std::string line;
  if (!std::getline(in, line)) throw DomainError(ErrorKind::io, "csv: empty input");
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split(line);
    if (cells.size() != t.header.size())
      throw DomainError(ErrorKind::io, "csv: wrong column count on line " + std::to_string(lineno));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::size_t TextTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DomainError(ErrorKind::io, "csv: missing column '" + name + "'");
}

double parse_number(const std::string& cell) {
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* b = cell.data();
  const char* e = b + cell.size();
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    throw DomainError(ErrorKind::io, "csv: bad number '" + cell + "'");
  return v;
}

}  // namespace stawg::csv
