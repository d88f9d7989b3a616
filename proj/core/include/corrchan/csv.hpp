#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace corrchan::csv {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_shortest(double value);
/// 17 significant digits (also round-trips).
std::string format_17(double value);

/// In-memory table; cells are preformatted strings, an empty cell marks "not applicable".
class Table {
 public:
  explicit Table(std::vector<std::string> header);

  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

  void add_row(std::vector<std::string> row);
  void append(const Table& other);
  std::string to_string() const;
  /// Writes through a temporary file in the same directory and renames it into place.
  void write_atomic(const std::filesystem::path& path) const;

  static Table parse(std::string_view text);
  static Table read(const std::filesystem::path& path);

  std::size_t column(std::string_view name) const;
  std::optional<double> number(std::size_t row, std::string_view column_name) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Write `contents` to `path` via temporary file + rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace corrchan::csv
