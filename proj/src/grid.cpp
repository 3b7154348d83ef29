#include "pss/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pss/error.hpp"

namespace pss {

PartitionGrid PartitionGrid::build(const Dataset& data, std::size_t ell) {
  if (data.empty() || data.cols() == 0) throw_invalid("cannot build a grid over an empty dataset");
  if (ell < 1) throw_invalid("partition count ell must be >= 1");

  const std::size_t d = data.cols();
  std::uint64_t cells = 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (cells > std::numeric_limits<std::uint64_t>::max() / ell) {
      throw_invalid("ell^d = " + std::to_string(ell) + "^" + std::to_string(d) +
                    " overflows the cell key");
    }
    cells *= ell;
  }

  PartitionGrid grid;
  grid.ell_ = ell;
  grid.mins_.assign(d, std::numeric_limits<double>::infinity());
  grid.maxs_.assign(d, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto row = data.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      grid.mins_[j] = std::min(grid.mins_[j], row[j]);
      grid.maxs_[j] = std::max(grid.maxs_[j], row[j]);
    }
  }
  grid.widths_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    if (!std::isfinite(grid.mins_[j]) || !std::isfinite(grid.maxs_[j])) {
      throw_invalid("non-finite value in column " + std::to_string(j));
    }
    grid.widths_[j] = (grid.maxs_[j] - grid.mins_[j]) / static_cast<double>(ell);
  }
  return grid;
}

bool PartitionGrid::contains(std::span<const double> point) const noexcept {
  if (point.size() != dims()) return false;
  for (std::size_t j = 0; j < dims(); ++j) {
    if (!(point[j] >= mins_[j] && point[j] <= maxs_[j])) return false;
  }
  return true;
}

std::uint32_t PartitionGrid::axis_coord(std::size_t axis, double x) const noexcept {
  if (widths_[axis] <= 0.0) return 0;
  const double pos = std::floor((x - mins_[axis]) / widths_[axis]);
  const double last = static_cast<double>(ell_ - 1);
  return static_cast<std::uint32_t>(std::clamp(pos, 0.0, last));
}

std::optional<CellIndex> PartitionGrid::cell_of(std::span<const double> point) const {
  if (!contains(point)) return std::nullopt;
  CellIndex cell;
  cell.coords.resize(dims());
  for (std::size_t j = 0; j < dims(); ++j) cell.coords[j] = axis_coord(j, point[j]);
  return cell;
}

std::optional<CellKey> PartitionGrid::key_of(std::span<const double> point) const {
  if (!contains(point)) return std::nullopt;
  CellKey key = 0;
  for (std::size_t j = 0; j < dims(); ++j) key = key * ell_ + axis_coord(j, point[j]);
  return key;
}

CellKey PartitionGrid::key(const CellIndex& cell) const noexcept {
  CellKey key = 0;
  for (auto c : cell.coords) key = key * ell_ + c;
  return key;
}

CellIndex PartitionGrid::index(CellKey key) const {
  CellIndex cell;
  cell.coords.resize(dims());
  for (std::size_t j = dims(); j-- > 0;) {
    cell.coords[j] = static_cast<std::uint32_t>(key % ell_);
    key /= ell_;
  }
  return cell;
}

std::size_t CellContents::total_rows() const noexcept {
  return std::accumulate(cells.begin(), cells.end(), std::size_t{0},
                         [](std::size_t acc, const OccupiedCell& c) { return acc + c.count(); });
}

const OccupiedCell* CellContents::find(CellKey key) const noexcept {
  auto it = std::lower_bound(cells.begin(), cells.end(), key,
                             [](const OccupiedCell& c, CellKey k) { return c.key < k; });
  if (it == cells.end() || it->key != key) return nullptr;
  return &*it;
}

PartitionGrid build_grid(const Dataset& data, std::size_t ell) {
  return PartitionGrid::build(data, ell);
}

CellContents partition_data(const PartitionGrid& grid, const Dataset& data) {
  if (data.cols() != grid.dims()) {
    throw_invalid("dataset has " + std::to_string(data.cols()) + " columns, grid has " +
                  std::to_string(grid.dims()));
  }
  std::vector<std::pair<CellKey, std::size_t>> keyed(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto key = grid.key_of(data.row(r));
    if (!key) throw_invalid("row " + std::to_string(r) + " lies outside the grid bounding box");
    keyed[r] = {*key, r};
  }
  // Sorting (key, row) pairs groups rows by cell with ascending row order, so
  // the result is independent of any processing order.
  std::sort(keyed.begin(), keyed.end());

  CellContents contents;
  for (std::size_t i = 0; i < keyed.size();) {
    OccupiedCell cell;
    cell.key = keyed[i].first;
    std::size_t j = i;
    while (j < keyed.size() && keyed[j].first == cell.key) cell.rows.push_back(keyed[j++].second);
    contents.cells.push_back(std::move(cell));
    i = j;
  }
  return contents;
}

}  // namespace pss
