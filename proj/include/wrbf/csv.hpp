#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wrbf {

/// Shortest-round-trip-safe "%.17g" rendering, '.' decimal, no locale.
std::string format_double(double value);

/// Locale-independent parse of a full field; throws Error(io) on junk.
double parse_double(const std::string& field);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws Error(io) when absent.
  std::size_t column(const std::string& name) const;
};

/// Plain comma-separated text without quoting. Accepts LF or CRLF.
CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

}  // namespace wrbf
