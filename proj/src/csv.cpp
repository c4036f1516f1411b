#include "sevrank/csv.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

namespace sevrank::csv {

namespace {

std::string row_message(std::size_t row, const std::string& what) {
  return "row " + std::to_string(row) + ": " + what;
}

}  // namespace

std::optional<std::size_t> Table::find_column(
    std::initializer_list<std::string_view> names) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    for (auto name : names) {
      if (header[i] == name) return i;
    }
  }
  return std::nullopt;
}

std::size_t Table::require_column(std::string_view name) const {
  return require_column({name});
}

std::size_t Table::require_column(
    std::initializer_list<std::string_view> names) const {
  if (auto idx = find_column(names)) return *idx;
  std::string joined;
  for (auto name : names) {
    if (!joined.empty()) joined += "|";
    joined += name;
  }
  throw CsvError("missing column '" + joined + "'", 1);
}

Table parse(std::string_view content, std::string_view comment_prefix) {
  // Strip a UTF-8 byte order mark.
  if (content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);

  std::vector<Record> records;
  Record current;
  std::string field;
  std::size_t pos = 0;
  const std::size_t n = content.size();

  if (!comment_prefix.empty()) {
    while (pos < n && content.substr(pos).starts_with(comment_prefix)) {
      auto eol = content.find('\n', pos);
      pos = eol == std::string_view::npos ? n : eol + 1;
    }
  }

  bool at_record_start = true;
  while (pos < n) {
    const std::size_t row = records.size() + 1;
    char c = content[pos];
    if (at_record_start && (c == '\n' || (c == '\r' && pos + 1 < n &&
                                          content[pos + 1] == '\n'))) {
      // Blank line between records; tolerated only as trailing noise.
      pos += c == '\n' ? 1 : 2;
      continue;
    }
    at_record_start = false;
    if (c == '"' && field.empty()) {
      ++pos;
      bool closed = false;
      while (pos < n) {
        char q = content[pos];
        if (q == '"') {
          if (pos + 1 < n && content[pos + 1] == '"') {
            field.push_back('"');
            pos += 2;
          } else {
            ++pos;
            closed = true;
            break;
          }
        } else {
          field.push_back(q);
          ++pos;
        }
      }
      if (!closed) throw CsvError(row_message(row, "unterminated quoted field"), row);
      if (pos < n && content[pos] != ',' && content[pos] != '\n' &&
          content[pos] != '\r') {
        throw CsvError(row_message(row, "unexpected character after closing quote"), row);
      }
      continue;
    }
    if (c == ',') {
      current.push_back(std::move(field));
      field.clear();
      ++pos;
      continue;
    }
    if (c == '\n' || c == '\r') {
      if (c == '\r') {
        if (pos + 1 >= n || content[pos + 1] != '\n') {
          throw CsvError(row_message(row, "bare carriage return"), row);
        }
        ++pos;
      }
      ++pos;
      current.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(current));
      current.clear();
      at_record_start = true;
      continue;
    }
    if (c == '"') {
      throw CsvError(row_message(row, "stray quote in unquoted field"), row);
    }
    field.push_back(c);
    ++pos;
  }
  if (!at_record_start) {
    current.push_back(std::move(field));
    records.push_back(std::move(current));
  }

  Table table;
  if (records.empty()) throw CsvError("missing header", 1);
  table.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != table.header.size()) {
      const std::size_t row = i + 1;
      throw CsvError(row_message(row, "expected " +
                                          std::to_string(table.header.size()) +
                                          " fields, found " +
                                          std::to_string(records[i].size())),
                     row);
    }
    table.rows.push_back(std::move(records[i]));
  }
  return table;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Table read_file(const std::string& path, std::string_view comment_prefix) {
  const std::string content = read_text_file(path);
  try {
    return parse(content, comment_prefix);
  } catch (const CsvError& e) {
    throw CsvError(path + ": " + e.what(), e.row());
  }
}

std::string escape_field(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_record(std::ostream& out, const Record& record) {
  for (std::size_t i = 0; i < record.size(); ++i) {
    if (i) out << ',';
    out << escape_field(record[i]);
  }
  out << '\n';
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value,
                                 std::chars_format::fixed, decimals);
  if (ec != std::errc{}) throw std::runtime_error("format_fixed failed");
  std::string s(buf, end);
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);  // "-0.000000"
  }
  return s;
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

long long parse_int(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace sevrank::csv
