#pragma once

#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stawg::csv {

// Shortest round-trip decimal form; byte-identical across runs and thread counts.
std::string format(double value);

void write_header(std::ostream& out, std::initializer_list<const char*> columns);
void write_row(std::ostream& out, std::span<const double> values);
void write_row(std::ostream& out, std::initializer_list<double> values);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a named column; throws DomainError(io) when absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> values(const std::string& name) const;
};

// Numeric CSV with one header line. Throws DomainError(io) on malformed input.
Table read(std::istream& in);

// Same layout with cells kept as text.
struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

TextTable read_text(std::istream& in);

// from_chars parse of a whole cell; "nan" is accepted.
double parse_number(const std::string& cell);

}  // namespace stawg::csv
