#include "ilac/csv.hpp"

#include <charconv>
#include <istream>
#include <system_error>

#include "ilac/error.hpp"

namespace ilac::csv {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(std::string_view field, std::string_view what) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw InvalidArgument("cannot parse " + std::string(what) + " from '" + std::string(field) +
                          "'");
  }
  return v;
}

long long parse_int(std::string_view field, std::string_view what) {
  long long v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw InvalidArgument("cannot parse " + std::string(what) + " from '" + std::string(field) +
                          "'");
  }
  return v;
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InvalidArgument("missing CSV column '" + std::string(name) + "'");
}

Table read(std::istream& in) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("CSV input is empty");
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto row = split_line(line);
    if (row.size() != t.header.size()) {
      throw InvalidArgument("CSV row has " + std::to_string(row.size()) + " fields, expected " +
                            std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace ilac::csv
