#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "pss/dataset.hpp"

namespace pss {

// Rectangular numeric table. Values are stored column-major.
class TableSource {
 public:
  TableSource(std::vector<std::string> names, std::size_t rows,
              std::vector<std::vector<double>> columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return columns_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<double>& column(std::size_t j) const { return columns_.at(j); }

  Dataset to_dataset() const;

 private:
  std::vector<std::string> names_;  // empty when the file had no header
  std::size_t rows_;
  std::vector<std::vector<double>> columns_;
};

// Parses a delimited numeric table. Errors are kParse and name the 1-based
// row and column of the offending cell (rows count physical lines, header
// included).
TableSource parse_table(std::istream& in, bool has_header, char delimiter = ',');
TableSource load_table(const std::filesystem::path& path, bool has_header, char delimiter = ',');

// Comma-separated rows with 17 significant digits.
void write_table(std::ostream& out, const Dataset& data, const std::vector<std::string>& names = {});

}  // namespace pss
