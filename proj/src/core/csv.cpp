#include "stabx/core/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "stabx/core/errors.hpp"

namespace stabx::csv {

std::optional<std::size_t> Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

std::vector<Record> parse_records(std::string_view text) {
  std::vector<Record> records;
  std::size_t pos = 0;
  std::size_t line = 1;
  if (text.starts_with("\xEF\xBB\xBF")) pos = 3;

  while (pos < text.size()) {
    Record record;
    record.line = line;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool done = false;
    while (!done) {
      if (pos >= text.size()) {
        if (in_quotes) {
          throw ParseError("unterminated quoted field starting at line " +
                               std::to_string(record.line),
                           record.line);
        }
        record.fields.push_back(std::move(field));
        break;
      }
      const char c = text[pos];
      if (in_quotes) {
        if (c == '"') {
          if (pos + 1 < text.size() && text[pos + 1] == '"') {
            field.push_back('"');
            pos += 2;
          } else {
            in_quotes = false;
            ++pos;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
          ++pos;
        }
        continue;
      }
      switch (c) {
        case '"':
          if (!field.empty() || field_was_quoted) {
            throw ParseError("unexpected quote at line " + std::to_string(line),
                             line);
          }
          in_quotes = true;
          field_was_quoted = true;
          ++pos;
          break;
        case ',':
          record.fields.push_back(std::move(field));
          field.clear();
          field_was_quoted = false;
          ++pos;
          break;
        case '\r':
          ++pos;
          break;
        case '\n':
          record.fields.push_back(std::move(field));
          ++pos;
          ++line;
          done = true;
          break;
        default:
          field.push_back(c);
          ++pos;
      }
    }
    // Blank lines carry no record.
    if (record.fields.size() == 1 && record.fields[0].empty()) continue;
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace

Table read(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  auto records = parse_records(text);
  if (records.empty()) throw ParseError("CSV input is empty (no header)", 0);

  Table table;
  table.header = std::move(records.front().fields);
  for (std::size_t i = 1; i < records.size(); ++i) {
    auto& r = records[i];
    if (r.fields.size() != table.header.size()) {
      throw ParseError("row " + std::to_string(r.line) + " has " +
                           std::to_string(r.fields.size()) +
                           " fields, header has " +
                           std::to_string(table.header.size()),
                       r.line);
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read(in);
}

void write_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out << f;
      continue;
    }
    out << '"';
    for (char c : f) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  }
  out << '\n';
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, end);
}

namespace {
std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}
}  // namespace

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<long long> parse_int(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace stabx::csv
