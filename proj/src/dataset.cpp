#include "pss/dataset.hpp"

#include <algorithm>
#include <string>

#include "pss/error.hpp"

namespace pss {

Dataset::Dataset(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

Dataset::Dataset(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw_invalid("dataset buffer holds " + std::to_string(values_.size()) +
                  " values, expected " + std::to_string(rows_ * cols_));
  }
}

Dataset::Dataset(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  values_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw_invalid("ragged dataset literal");
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

Dataset Dataset::from_column(std::span<const double> column) {
  return Dataset(column.size(), 1, std::vector<double>(column.begin(), column.end()));
}

std::vector<double> Dataset::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Dataset Dataset::select_columns(std::span<const std::size_t> cols) const {
  Dataset out(rows_, cols.size());
  for (std::size_t c : cols) {
    if (c >= cols_) throw_invalid("column index " + std::to_string(c) + " out of range");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = (*this)(r, cols[j]);
  }
  return out;
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  Dataset out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= rows_) throw_invalid("row index " + std::to_string(rows[i]) + " out of range");
    auto src = row(rows[i]);
    auto dst = out.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

Dataset Dataset::hstack(const Dataset& left, const Dataset& right) {
  if (left.rows() != right.rows()) {
    throw_invalid("cannot join datasets with " + std::to_string(left.rows()) + " and " +
                  std::to_string(right.rows()) + " rows");
  }
  Dataset out(left.rows(), left.cols() + right.cols());
  for (std::size_t r = 0; r < left.rows(); ++r) {
    auto dst = out.row(r);
    auto a = left.row(r);
    auto b = right.row(r);
    std::copy(a.begin(), a.end(), dst.begin());
    std::copy(b.begin(), b.end(), dst.begin() + static_cast<std::ptrdiff_t>(a.size()));
  }
  return out;
}

}  // namespace pss
