#pragma once

// Univariate m-spacing primitives: order statistics with index clamping, the
// averaged grid points xi_0..xi_{n+1}, the spacing density, and the Vasicek
// entropy estimator. Entropies are in nats.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace pss {

// Nondecreasing sample of size n >= 2. Order statistics are addressed with the
// 1-based convention x_(1) <= ... <= x_(n); out-of-range indices clamp to the
// nearest end.
class SortedSample {
 public:
  // Validates ordering; throws kInvalidInput when unsorted or n < 2.
  explicit SortedSample(std::vector<double> sorted_values);

  static SortedSample from_unsorted(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  // x_(i) with i < 1 -> x_(1), i > n -> x_(n).
  double order_stat(std::ptrdiff_t i) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(values_.size());
    if (i < 1) return values_.front();
    if (i > n) return values_.back();
    return values_[static_cast<std::size_t>(i - 1)];
  }

  // m-spacing x_(i+m) - x_(i-m) with clamped indices.
  double spacing(std::ptrdiff_t i, std::size_t m) const noexcept {
    const auto mm = static_cast<std::ptrdiff_t>(m);
    return order_stat(i + mm) - order_stat(i - mm);
  }

 private:
  std::vector<double> values_;
};

struct SpacingM {
  std::size_t value = 1;
};

// Grid points xi_0..xi_{n+1}. xi_0 and xi_{n+1} are the sample extremes.
class SpacingGrid {
 public:
  explicit SpacingGrid(std::vector<double> xi) : xi_(std::move(xi)) {}

  std::size_t size() const noexcept { return xi_.size(); }
  double operator[](std::size_t i) const noexcept { return xi_[i]; }
  std::span<const double> points() const noexcept { return xi_; }
  double lower() const noexcept { return xi_.front(); }
  double upper() const noexcept { return xi_.back(); }

  // Index i of the interval holding x: (xi_i, xi_{i+1}] for i >= 1 and the
  // closed [xi_0, xi_1] for i = 0. Returns nullopt outside [xi_0, xi_{n+1}].
  std::optional<std::size_t> locate(double x) const noexcept;

 private:
  std::vector<double> xi_;
};

// floor(sqrt(n) + 1/2), clamped to n - 1. Throws kInvalidInput for n < 2.
SpacingM default_m(std::size_t n);

// Throws kInvalidInput when m is outside [1, n-1].
SpacingGrid xi_grid(const SortedSample& sample, SpacingM m);

// Spacing density 2m / (n * (x_(i+m) - x_(i-m))) on the interval holding x,
// 0 outside the grid's support, nullopt when the spacing is zero.
std::optional<double> spacing_density(const SortedSample& sample, SpacingM m,
                                      const SpacingGrid& grid, double x);

// Mean over i = 1..n of log((n / 2m) * (x_(i+m) - x_(i-m))). Zero spacings are
// dropped from both the sum and the divisor; an all-zero sample throws
// kDegenerate.
double vasicek_entropy(const SortedSample& sample, SpacingM m);

}  // namespace pss
