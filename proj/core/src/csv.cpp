#include "corrchan/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "corrchan/errors.hpp"

namespace corrchan::csv {

namespace {

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.emplace_back(line.substr(start));
      break;
    }
    cells.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

std::string to_chars_string(double value, std::chars_format fmt, std::optional<int> precision) {
  std::array<char, 64> buf{};
  const auto res = precision ? std::to_chars(buf.data(), buf.data() + buf.size(), value, fmt,
                                             *precision)
                             : std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (res.ec != std::errc()) throw Error("number formatting failed");
  return {buf.data(), res.ptr};
}

}  // namespace

std::string format_shortest(double value) {
  return to_chars_string(value, std::chars_format::general, std::nullopt);
}

std::string format_17(double value) {
  return to_chars_string(value, std::chars_format::general, 17);
}

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw Error("csv row width does not match header");
  rows_.push_back(std::move(row));
}

void Table::append(const Table& other) {
  if (other.header_ != header_) throw Error("csv tables have different headers");
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

std::string Table::to_string() const {
  std::ostringstream os;
  auto emit = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return os.str();
}

void Table::write_atomic(const std::filesystem::path& path) const {
  write_file_atomic(path, to_string());
}

Table Table::parse(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = nl + 1;
  }
  if (lines.empty()) throw Error("csv: missing header");
  Table t(split_line(lines.front()));
  for (std::size_t i = 1; i < lines.size(); ++i) t.add_row(split_line(lines[i]));
  return t;
}

Table Table::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("csv: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  throw Error("csv: no column named " + std::string(name));
}

std::optional<double> Table::number(std::size_t row, std::string_view column_name) const {
  const std::string& cell = rows_.at(row).at(column(column_name));
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    throw Error("csv: not a number: " + cell);
  }
  return value;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace corrchan::csv
