#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sevrank::csv {

/// Thrown for unreadable files and malformed records. `row()` is the 1-based
/// record number within the file (the header is row 1), or 0 when the error
/// is not tied to a record.
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, std::size_t row)
      : std::runtime_error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

using Record = std::vector<std::string>;

/// A parsed RFC-4180 table: UTF-8, comma separated, double-quote escaping,
/// LF or CRLF record terminators. Quoted fields may contain newlines.
struct Table {
  Record header;
  std::vector<Record> rows;

  /// Index of the first header column whose name is in `names`.
  std::optional<std::size_t> find_column(
      std::initializer_list<std::string_view> names) const;
  std::size_t require_column(std::string_view name) const;
  std::size_t require_column(
      std::initializer_list<std::string_view> names) const;

  /// File row number (header = 1) of data row `i`.
  static constexpr std::size_t file_row(std::size_t i) noexcept {
    return i + 2;
  }
};

/// Parses `content`. Every record must have as many fields as the header.
/// Lines starting with `comment_prefix` (when non-empty) before the header
/// are skipped.
Table parse(std::string_view content, std::string_view comment_prefix = {});
Table read_file(const std::string& path, std::string_view comment_prefix = {});

std::string read_text_file(const std::string& path);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape_field(std::string_view field);
void write_record(std::ostream& out, const Record& record);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);
/// Fixed-point with `decimals` places.
std::string format_fixed(double value, int decimals);
/// Strict full-string parse; throws std::invalid_argument on failure.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);

}  // namespace sevrank::csv
