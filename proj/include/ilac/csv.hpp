#pragma once

// Minimal CSV helpers shared by the dataset, curve and result writers.
// Fields never contain commas or quotes, so no quoting is implemented.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ilac::csv {

// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

std::vector<std::string> split_line(std::string_view line);

// Parses a whole-field double; throws InvalidArgument naming `what` on failure.
double parse_double(std::string_view field, std::string_view what);
long long parse_int(std::string_view field, std::string_view what);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws InvalidArgument if absent.
  std::size_t column(std::string_view name) const;
};

// Reads a header line plus rows; every row must have the header's width.
Table read(std::istream& in);

}  // namespace ilac::csv
