#include "pss/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pss/error.hpp"

namespace pss {

CellModel::CellModel(CellKey key, std::size_t count, SpacingM m, std::vector<SpacingAxis> axes)
    : key_(key), count_(count), m_(m), axes_(std::move(axes)) {}

double LogLikelihood::mean_negative() const noexcept {
  if (defined == 0) return std::numeric_limits<double>::quiet_NaN();
  return -sum / static_cast<double>(defined);
}

PssModel PssModel::fit(const Dataset& data, const PssConfig& cfg) {
  if (data.cols() == 0) throw_invalid("PSS fit needs at least one column");
  if (data.rows() < 2) throw_invalid("PSS fit needs at least 2 rows, got " + std::to_string(data.rows()));
  if (cfg.min_cell_count < 2) throw_invalid("min_cell_count must be >= 2");
  if (cfg.m_override && *cfg.m_override < 1) throw_invalid("spacing override must be >= 1");

  PssModel model(PartitionGrid::build(data, cfg.ell), data.rows());
  const CellContents contents = partition_data(model.grid_, data);
  const std::size_t d = data.cols();

  for (const auto& cell : contents.cells) {
    const std::size_t nk = cell.count();
    if (nk < cfg.min_cell_count) {
      model.skipped_.push_back({cell.key, nk});
      continue;
    }
    SpacingM m = cfg.m_override ? SpacingM{std::min(*cfg.m_override, nk - 1)} : default_m(nk);
    std::vector<SpacingAxis> axes;
    axes.reserve(d);
    std::vector<double> values(nk);
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < nk; ++i) values[i] = data(cell.rows[i], j);
      auto sample = SortedSample::from_unsorted(values);
      auto grid = xi_grid(sample, m);
      axes.push_back({std::move(sample), std::move(grid)});
    }
    model.lookup_.emplace(cell.key, model.cells_.size());
    model.cells_.emplace_back(cell.key, nk, m, std::move(axes));
  }
  return model;
}

const CellModel* PssModel::find_cell(CellKey key) const noexcept {
  auto it = lookup_.find(key);
  return it == lookup_.end() ? nullptr : &cells_[it->second];
}

LogDensity PssModel::log_density(std::span<const double> point) const {
  const auto key = grid_.key_of(point);
  if (!key) return LogDensity::out_of_range();
  const CellModel* cell = find_cell(*key);
  if (cell == nullptr) return LogDensity::undefined();

  const double nk = static_cast<double>(cell->count());
  const double two_m = 2.0 * static_cast<double>(cell->m().value);
  double value = std::log(nk / static_cast<double>(n_));
  for (std::size_t j = 0; j < point.size(); ++j) {
    const SpacingAxis& axis = cell->axes()[j];
    const auto interval = axis.grid.locate(point[j]);
    if (!interval) return LogDensity::undefined();
    const double delta = axis.sample.spacing(static_cast<std::ptrdiff_t>(*interval), cell->m().value);
    if (!(delta > 0.0)) return LogDensity::undefined();
    value += std::log(two_m / (nk * delta));
  }
  return LogDensity::defined(value);
}

LogLikelihood log_likelihood(const PssModel& model, const Dataset& points) {
  if (points.cols() != model.dims()) {
    throw_invalid("points have " + std::to_string(points.cols()) + " columns, model has " +
                  std::to_string(model.dims()));
  }
  LogLikelihood ll;
  for (std::size_t r = 0; r < points.rows(); ++r) {
    const LogDensity ld = model.log_density(points.row(r));
    switch (ld.status()) {
      case LogDensity::Status::kDefined:
        ll.sum += ld.value();
        ++ll.defined;
        break;
      case LogDensity::Status::kUndefined:
        ++ll.undefined;
        break;
      case LogDensity::Status::kOutOfRange:
        ++ll.out_of_range;
        break;
    }
  }
  return ll;
}

EntropyEstimate entropy(const Dataset& data, const PssConfig& cfg) {
  const PssModel model = PssModel::fit(data, cfg);
  const LogLikelihood ll = log_likelihood(model, data);
  if (ll.defined == 0) throw_degenerate("every row fell in a skipped cell or a zero spacing");

  EntropyEstimate est;
  est.sample_size = data.rows();
  est.skipped_rows = data.rows() - ll.defined;
  est.value = cfg.divisor == EntropyDivisor::kAllRows
                  ? -ll.sum / static_cast<double>(data.rows())
                  : ll.mean_negative();
  return est;
}

DensityMass density_mass(const PssModel& model) {
  const double n = static_cast<double>(model.sample_size());
  const double d = static_cast<double>(model.dims());
  DensityMass mass;
  for (const CellModel& cell : model.cells()) {
    const std::size_t nk = cell.count();
    const double weight = static_cast<double>(nk) / n;
    const double two_m = 2.0 * static_cast<double>(cell.m().value);
    double product = 1.0;
    for (const SpacingAxis& axis : cell.axes()) {
      // Interior intervals (xi_i, xi_{i+1}], i = 1..n_k-1.
      double axis_mass = 0.0;
      for (std::size_t i = 1; i < nk; ++i) {
        const double delta = axis.sample.spacing(static_cast<std::ptrdiff_t>(i), cell.m().value);
        if (!(delta > 0.0)) continue;
        const double width = axis.grid[i + 1] - axis.grid[i];
        axis_mass += width * two_m / (static_cast<double>(nk) * delta);
      }
      product *= axis_mass;
    }
    mass.interior += weight * product;
    mass.closed_form += weight * std::pow(1.0 - 1.0 / static_cast<double>(nk), d);
  }
  return mass;
}

double mutual_information(const Dataset& x, const Dataset& y, const PssConfig& cfg) {
  if (x.rows() != y.rows()) {
    throw_invalid("mutual information needs equal row counts, got " + std::to_string(x.rows()) +
                  " and " + std::to_string(y.rows()));
  }
  const double hx = entropy(x, cfg).value;
  const double hy = entropy(y, cfg).value;
  // Canonical column order for the joint keeps I(X;Y) and I(Y;X) bitwise equal.
  const bool swap = x.cols() != y.cols() ? y.cols() < x.cols() : y.values() < x.values();
  const double hxy = entropy(swap ? Dataset::hstack(y, x) : Dataset::hstack(x, y), cfg).value;
  return hx + hy - hxy;
}

double total_correlation(const Dataset& data, const PssConfig& cfg) {
  if (data.cols() < 2) throw_invalid("total correlation needs d >= 2");
  double marginals = 0.0;
  for (std::size_t j = 0; j < data.cols(); ++j) {
    marginals += entropy(Dataset::from_column(data.column(j)), cfg).value;
  }
  return marginals - entropy(data, cfg).value;
}

}  // namespace pss
