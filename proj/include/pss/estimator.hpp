#pragma once

// Partitioned sample-spacing (PSS) density model and the entropy, mutual
// information and total correlation estimators built on it.
//
// Within every occupied cell k of an ell^d grid the density is the product of
// per-axis spacing densities, weighted by the cell's share of the sample:
//
//   f(x) = (n_k / n) * prod_j 2 m_k / (n_k * (x_{j,(a_j+m_k)} - x_{j,(a_j-m_k)}))
//
// where a_j is the index of the sub-grid interval holding x_j. Cells with fewer
// than `min_cell_count` rows are skipped and contribute nothing.

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "pss/dataset.hpp"
#include "pss/grid.hpp"
#include "pss/spacing.hpp"

namespace pss {

// How the plug-in entropy averages log-densities when some rows are skipped.
enum class EntropyDivisor {
  kAllRows,          // -S / n, skipped rows add 0 to S
  kContributingRows  // -S / (number of rows with a defined density)
};

struct PssConfig {
  std::size_t ell = 1;
  std::optional<std::size_t> m_override;  // per-cell default floor(sqrt(n_k) + 1/2)
  std::size_t min_cell_count = 2;
  EntropyDivisor divisor = EntropyDivisor::kAllRows;
};

class LogDensity {
 public:
  enum class Status { kDefined, kUndefined, kOutOfRange };

  static LogDensity defined(double value) { return LogDensity(Status::kDefined, value); }
  static LogDensity undefined() { return LogDensity(Status::kUndefined, 0.0); }
  static LogDensity out_of_range() { return LogDensity(Status::kOutOfRange, 0.0); }

  Status status() const noexcept { return status_; }
  bool is_defined() const noexcept { return status_ == Status::kDefined; }
  // Only meaningful when is_defined().
  double value() const noexcept { return value_; }

 private:
  LogDensity(Status status, double value) : status_(status), value_(value) {}

  Status status_;
  double value_;
};

// One axis of a cell: the sorted marginal values and their xi grid.
struct SpacingAxis {
  SortedSample sample;
  SpacingGrid grid;
};

class CellModel {
 public:
  CellModel(CellKey key, std::size_t count, SpacingM m, std::vector<SpacingAxis> axes);

  CellKey key() const noexcept { return key_; }
  std::size_t count() const noexcept { return count_; }
  SpacingM m() const noexcept { return m_; }
  const std::vector<SpacingAxis>& axes() const noexcept { return axes_; }

 private:
  CellKey key_;
  std::size_t count_;
  SpacingM m_;
  std::vector<SpacingAxis> axes_;
};

struct SkippedCell {
  CellKey key = 0;
  std::size_t count = 0;
};

class PssModel {
 public:
  // Throws kInvalidInput for d = 0, n < 2, ell < 1 or min_cell_count < 2.
  static PssModel fit(const Dataset& data, const PssConfig& cfg);

  const PartitionGrid& grid() const noexcept { return grid_; }
  const std::vector<CellModel>& cells() const noexcept { return cells_; }
  const std::vector<SkippedCell>& skipped_cells() const noexcept { return skipped_; }
  std::size_t sample_size() const noexcept { return n_; }
  std::size_t dims() const noexcept { return grid_.dims(); }

  const CellModel* find_cell(CellKey key) const noexcept;

  LogDensity log_density(std::span<const double> point) const;

 private:
  PssModel(PartitionGrid grid, std::size_t n) : grid_(std::move(grid)), n_(n) {}

  PartitionGrid grid_;
  std::size_t n_;
  std::vector<CellModel> cells_;
  std::vector<SkippedCell> skipped_;
  std::unordered_map<CellKey, std::size_t> lookup_;
};

// Sum of defined log-densities of `points` under `model`, with the counts of
// points that had no defined density.
struct LogLikelihood {
  double sum = 0.0;
  std::size_t defined = 0;
  std::size_t undefined = 0;
  std::size_t out_of_range = 0;

  std::size_t total() const noexcept { return defined + undefined + out_of_range; }
  // -sum / defined; NaN if nothing was defined.
  double mean_negative() const noexcept;
};

LogLikelihood log_likelihood(const PssModel& model, const Dataset& points);

struct EntropyEstimate {
  double value = 0.0;          // nats
  std::size_t skipped_rows = 0;
  std::size_t sample_size = 0;
};

// Plug-in entropy -(1/n) sum_v log f(X_v) of the model fitted on `data`.
// Throws kDegenerate if no row has a defined density.
EntropyEstimate entropy(const Dataset& data, const PssConfig& cfg);

struct DensityMass {
  double interior = 0.0;     // exact integral over every stored cell's interior sub-grid
  double closed_form = 0.0;  // sum_k (n_k / n) (1 - 1/n_k)^d over stored cells
};

DensityMass density_mass(const PssModel& model);

// H(X) + H(Y) - H(X, Y), all at the same configuration.
double mutual_information(const Dataset& x, const Dataset& y, const PssConfig& cfg);

// sum_j H(X_j) - H(X); marginals use one-dimensional models at the same ell.
double total_correlation(const Dataset& data, const PssConfig& cfg);

}  // namespace pss
