#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stabx::csv {

// One parsed CSV record and the physical line on which it starts.
struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

struct Table {
  std::vector<std::string> header;
  std::vector<Record> rows;

  // Column index for `name`, if present.
  std::optional<std::size_t> column(std::string_view name) const;
};

// RFC-4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF and
// a leading UTF-8 BOM are accepted. Every row must have as many fields as the
// header.
Table read(std::istream& in);
Table read_file(const std::filesystem::path& path);

void write_row(std::ostream& out, std::span<const std::string> fields);

// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

}  // namespace stabx::csv
