#include "pss/spacing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pss/error.hpp"

namespace pss {

SortedSample::SortedSample(std::vector<double> sorted_values)
    : values_(std::move(sorted_values)) {
  if (values_.size() < 2) throw_invalid("sorted sample needs at least 2 values");
  if (!std::is_sorted(values_.begin(), values_.end())) {
    throw_invalid("sorted sample values are not nondecreasing");
  }
}

SortedSample SortedSample::from_unsorted(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return SortedSample(std::move(values));
}

std::optional<std::size_t> SpacingGrid::locate(double x) const noexcept {
  if (!(x >= xi_.front() && x <= xi_.back())) return std::nullopt;
  // First grid point >= x closes the interval on the right.
  const auto it = std::lower_bound(xi_.begin(), xi_.end(), x);
  const auto pos = static_cast<std::size_t>(it - xi_.begin());
  // Largest valid interval index is n, i.e. size() - 2.
  return std::min(pos == 0 ? std::size_t{0} : pos - 1, xi_.size() - 2);
}

SpacingM default_m(std::size_t n) {
  if (n < 2) throw_invalid("spacing rate needs n >= 2, got " + std::to_string(n));
  const auto m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)) + 0.5));
  return SpacingM{std::clamp<std::size_t>(m, 1, n - 1)};
}

SpacingGrid xi_grid(const SortedSample& sample, SpacingM m) {
  const std::size_t n = sample.size();
  if (m.value < 1 || m.value >= n) {
    throw_invalid("spacing parameter m=" + std::to_string(m.value) + " outside [1, " +
                  std::to_string(n - 1) + "]");
  }
  const auto mm = static_cast<std::ptrdiff_t>(m.value);
  const double two_m = 2.0 * static_cast<double>(m.value);
  const double lo = sample.values().front();
  const double hi = sample.values().back();

  std::vector<double> xi(n + 2);
  xi[0] = lo;
  xi[n + 1] = hi;

  // xi_1 is the window mean of x_(1-m)..x_(m); later points slide the window,
  // so xi_{i+1} - xi_i = (x_(i+m) - x_(i-m)) / 2m holds term by term.
  double acc = 0.0;
  for (std::ptrdiff_t r = 1 - mm; r <= mm; ++r) acc += sample.order_stat(r);
  double current = acc / two_m;
  for (std::size_t i = 1; i <= n; ++i) {
    xi[i] = std::clamp(current, lo, hi);
    const auto ii = static_cast<std::ptrdiff_t>(i);
    current += sample.spacing(ii, m.value) / two_m;
  }
  // Clamping guards the drift of the running sum; keep the grid monotone.
  for (std::size_t i = 1; i <= n + 1; ++i) xi[i] = std::max(xi[i], xi[i - 1]);
  return SpacingGrid(std::move(xi));
}

std::optional<double> spacing_density(const SortedSample& sample, SpacingM m,
                                      const SpacingGrid& grid, double x) {
  const auto interval = grid.locate(x);
  if (!interval) return 0.0;
  const double delta = sample.spacing(static_cast<std::ptrdiff_t>(*interval), m.value);
  if (!(delta > 0.0)) return std::nullopt;
  return 2.0 * static_cast<double>(m.value) / (static_cast<double>(sample.size()) * delta);
}

double vasicek_entropy(const SortedSample& sample, SpacingM m) {
  const std::size_t n = sample.size();
  if (m.value < 1 || m.value >= n) {
    throw_invalid("spacing parameter m=" + std::to_string(m.value) + " outside [1, " +
                  std::to_string(n - 1) + "]");
  }
  const double scale = static_cast<double>(n) / (2.0 * static_cast<double>(m.value));
  double sum = 0.0;
  std::size_t terms = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double delta = sample.spacing(static_cast<std::ptrdiff_t>(i), m.value);
    if (!(delta > 0.0)) continue;
    sum += std::log(scale * delta);
    ++terms;
  }
  if (terms == 0) throw_degenerate("all m-spacings are zero (constant sample)");
  return sum / static_cast<double>(terms);
}

}  // namespace pss
