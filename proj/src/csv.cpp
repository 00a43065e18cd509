#include "wrbf/csv.hpp"

#include "wrbf/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace wrbf {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (res.ec != std::errc{}) fail(ErrorCode::internal, "could not format a double");
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (begin != end && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end) fail(ErrorCode::io, "not a number: '" + field + "'");
  return value;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  fail(ErrorCode::io, "csv column '" + name + "' not found");
}

namespace {

std::vector<std::string> split(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::io, "csv input is empty");
  table.header = split(line);
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    auto row = split(line);
    if (row.size() != table.header.size())
      fail(ErrorCode::io, "csv row has " + std::to_string(row.size()) + " fields, header has " +
                              std::to_string(table.header.size()));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  return read_csv(in);
}

}  // namespace wrbf
