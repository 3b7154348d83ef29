#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pss {

// Dense n x d sample matrix stored row-major. Rows are observations.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t rows, std::size_t cols);
  Dataset(std::size_t rows, std::size_t cols, std::vector<double> values);

  // Convenience for tests and small fixtures: each inner list is one row.
  Dataset(std::initializer_list<std::initializer_list<double>> rows);

  static Dataset from_column(std::span<const double> column);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) {
    return {values_.data() + r * cols_, cols_};
  }

  std::vector<double> column(std::size_t c) const;

  Dataset select_columns(std::span<const std::size_t> cols) const;
  Dataset select_rows(std::span<const std::size_t> rows) const;

  // Horizontal concatenation; both operands must have the same row count.
  static Dataset hstack(const Dataset& left, const Dataset& right);

  const std::vector<double>& values() const noexcept { return values_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

}  // namespace pss
