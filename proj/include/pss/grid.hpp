#pragma once

// Axis-aligned equal-width partition of the data's bounding box into ell^d
// cells. Only occupied cells are ever stored.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pss/dataset.hpp"

namespace pss {

// Per-axis cell coordinates, each in [0, ell - 1].
struct CellIndex {
  std::vector<std::uint32_t> coords;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

// Row-major linearization of a CellIndex; fits because ell^d is checked to be
// representable when the grid is built.
using CellKey = std::uint64_t;

class PartitionGrid {
 public:
  // Ranges come from `data`. Throws kInvalidInput for an empty dataset, ell < 1
  // or an ell^d that overflows 64 bits.
  static PartitionGrid build(const Dataset& data, std::size_t ell);

  std::size_t dims() const noexcept { return mins_.size(); }
  std::size_t ell() const noexcept { return ell_; }
  std::span<const double> mins() const noexcept { return mins_; }
  std::span<const double> maxs() const noexcept { return maxs_; }
  std::span<const double> widths() const noexcept { return widths_; }

  bool contains(std::span<const double> point) const noexcept;

  // nullopt when the point lies outside the bounding box.
  std::optional<CellIndex> cell_of(std::span<const double> point) const;
  std::optional<CellKey> key_of(std::span<const double> point) const;

  CellKey key(const CellIndex& cell) const noexcept;
  CellIndex index(CellKey key) const;

 private:
  std::uint32_t axis_coord(std::size_t axis, double x) const noexcept;

  std::size_t ell_ = 1;
  std::vector<double> mins_;
  std::vector<double> maxs_;
  std::vector<double> widths_;
};

struct OccupiedCell {
  CellKey key = 0;
  std::vector<std::size_t> rows;  // ascending

  std::size_t count() const noexcept { return rows.size(); }
};

// Occupied cells sorted by key. Every row of the partitioned dataset appears in
// exactly one cell.
struct CellContents {
  std::vector<OccupiedCell> cells;

  std::size_t total_rows() const noexcept;
  const OccupiedCell* find(CellKey key) const noexcept;
};

PartitionGrid build_grid(const Dataset& data, std::size_t ell);

// Throws kInvalidInput if a row falls outside the grid's bounding box.
CellContents partition_data(const PartitionGrid& grid, const Dataset& data);

}  // namespace pss
