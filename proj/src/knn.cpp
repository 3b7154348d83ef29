#include "pss/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "pss/error.hpp"

namespace pss {
namespace {

void check_k(std::size_t n, std::size_t k) {
  if (k < 1 || k + 1 > n) {
    throw_invalid("neighbour order k=" + std::to_string(k) + " needs 1 <= k <= n-1 with n=" +
                  std::to_string(n));
  }
}

double digamma(std::size_t x) { return boost::math::digamma(static_cast<double>(x)); }

}  // namespace

Dataset jitter_duplicates(const Dataset& data, std::uint64_t seed) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto row_less = [&](std::size_t a, std::size_t b) {
    const auto ra = data.row(a);
    const auto rb = data.row(b);
    if (std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end())) return true;
    if (std::equal(ra.begin(), ra.end(), rb.begin())) return a < b;
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);

  std::vector<std::size_t> duplicates;
  for (std::size_t i = 1; i < n; ++i) {
    const auto prev = data.row(order[i - 1]);
    const auto cur = data.row(order[i]);
    if (std::equal(prev.begin(), prev.end(), cur.begin())) duplicates.push_back(order[i]);
  }
  if (duplicates.empty()) return data;
  std::sort(duplicates.begin(), duplicates.end());

  std::vector<double> magnitude(d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = data.column(j);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    magnitude[j] = 1e-10 * (*hi - *lo);
  }
  Dataset out = data;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t r : duplicates) {
    for (std::size_t j = 0; j < d; ++j) out(r, j) += magnitude[j] * unit(rng);
  }
  return out;
}

NeighborTable neighbor_table(const Dataset& data, std::size_t k_max, Norm norm,
                             NeighborSearch search) {
  check_k(data.rows(), k_max);
  NeighborTable table;
  table.k_max = k_max;
  table.norm = norm;
  table.rows.resize(data.rows());
  if (search == NeighborSearch::kBruteForce) {
    for (std::size_t i = 0; i < data.rows(); ++i) table.rows[i] = brute_force_query(data, i, k_max, norm);
  } else {
    const KdTree tree(data);
    for (std::size_t i = 0; i < data.rows(); ++i) table.rows[i] = tree.query(i, k_max, norm);
  }
  return table;
}

double log_unit_ball_volume(std::size_t d) {
  const double half = 0.5 * static_cast<double>(d);
  return half * std::log(M_PI) - std::lgamma(1.0 + half);
}

double kl_entropy_from(const Dataset& data, const NeighborTable& table, std::size_t k) {
  const std::size_t n = data.rows();
  check_k(n, k);
  if (k > table.k_max || table.norm != Norm::kEuclidean) {
    throw_invalid("neighbour table does not cover Euclidean k=" + std::to_string(k));
  }
  double sum_log = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = table.rows[i][k - 1].distance;
    if (!(r > 0.0)) throw_degenerate("zero k-th neighbour distance at row " + std::to_string(i));
    sum_log += std::log(r);
  }
  const double d = static_cast<double>(data.cols());
  return -digamma(k) + digamma(n) + log_unit_ball_volume(data.cols()) +
         d * sum_log / static_cast<double>(n);
}

double ksg_entropy_from(const Dataset& data, const NeighborTable& table, std::size_t k,
                        KsgWidth width) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  check_k(n, k);
  if (k > table.k_max || table.norm != Norm::kMax) {
    throw_invalid("neighbour table does not cover max-norm k=" + std::to_string(k));
  }
  double sum_log = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = data.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      double r = 0.0;
      if (width == KsgWidth::kNeighborOffset) {
        r = std::abs(xi[j] - data(table.rows[i][k - 1].index, j));
      } else {
        for (std::size_t t = 0; t < k; ++t) {
          r = std::max(r, std::abs(xi[j] - data(table.rows[i][t].index, j)));
        }
        r *= 2.0;
      }
      if (!(r > 0.0)) {
        throw_degenerate("zero KSG width at row " + std::to_string(i) + ", column " +
                         std::to_string(j));
      }
      sum_log += std::log(r);
    }
  }
  return -digamma(k) + digamma(n) +
         static_cast<double>(d - 1) / static_cast<double>(k) + sum_log / static_cast<double>(n);
}

double kl_entropy(const Dataset& data, const KnnConfig& cfg) {
  check_k(data.rows(), cfg.k);
  const Dataset points = jitter_duplicates(data, cfg.jitter_seed);
  return kl_entropy_from(points, neighbor_table(points, cfg.k, Norm::kEuclidean, cfg.search), cfg.k);
}

double ksg_entropy(const Dataset& data, const KnnConfig& cfg) {
  check_k(data.rows(), cfg.k);
  const Dataset points = jitter_duplicates(data, cfg.jitter_seed);
  return ksg_entropy_from(points, neighbor_table(points, cfg.k, Norm::kMax, cfg.search), cfg.k,
                          cfg.ksg_width);
}

}  // namespace pss
