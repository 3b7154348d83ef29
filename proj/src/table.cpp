#include "pss/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pss/error.hpp"

namespace pss {
namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::kParse, what); }

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delimiter)) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == delimiter) cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    parse_error("non-numeric value '" + cell + "' at row " + std::to_string(row) + " col " +
                std::to_string(col));
  }
  return value;
}

}  // namespace

TableSource::TableSource(std::vector<std::string> names, std::size_t rows,
                         std::vector<std::vector<double>> columns)
    : names_(std::move(names)), rows_(rows), columns_(std::move(columns)) {}

Dataset TableSource::to_dataset() const {
  Dataset out(rows_, columns_.size());
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    for (std::size_t r = 0; r < rows_; ++r) out(r, j) = columns_[j][r];
  }
  return out;
}

TableSource parse_table(std::istream& in, bool has_header, char delimiter) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line, delimiter);
    if (header_pending) {
      names = std::move(cells);
      header_pending = false;
      continue;
    }
    if (columns.empty()) {
      if (!names.empty() && names.size() != cells.size()) {
        parse_error("row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                    " cells but the header names " + std::to_string(names.size()));
      }
      columns.resize(cells.size());
    } else if (cells.size() != columns.size()) {
      parse_error("ragged row " + std::to_string(line_no) + ": expected " +
                  std::to_string(columns.size()) + " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      columns[j].push_back(parse_cell(cells[j], line_no, j + 1));
    }
    ++rows;
  }
  if (rows == 0) parse_error("table has no data rows");
  return TableSource(std::move(names), rows, std::move(columns));
}

TableSource load_table(const std::filesystem::path& path, bool has_header, char delimiter) {
  std::ifstream in(path);
  if (!in) throw_invalid("cannot open " + path.string());
  return parse_table(in, has_header, delimiter);
}

void write_table(std::ostream& out, const Dataset& data, const std::vector<std::string>& names) {
  const auto old_precision = out.precision(17);
  if (!names.empty()) {
    for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
    out << '\n';
  }
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t j = 0; j < data.cols(); ++j) out << (j ? "," : "") << data(r, j);
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace pss
