#pragma once

// Kozachenko-Leonenko (KL) and Kraskov-Stoegbauer-Grassberger (KSG) entropy
// estimators, used as baselines for the PSS estimator.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pss/dataset.hpp"
#include "pss/kdtree.hpp"

namespace pss {

enum class NeighborSearch { kKdTree, kBruteForce };

// What R_{i,j} means in the KSG sum over log R_{i,j}.
enum class KsgWidth {
  // |x_ij - y_j| for the k-th max-norm neighbour y of x_i.
  kNeighborOffset,
  // Kraskov's rectangle side: twice the largest |x_ij - y_j| over the k nearest
  // max-norm neighbours.
  kRectangleSide,
};

struct KnnConfig {
  std::size_t k = 1;
  NeighborSearch search = NeighborSearch::kKdTree;
  KsgWidth ksg_width = KsgWidth::kNeighborOffset;
  std::uint64_t jitter_seed = 0x5eed;
};

// Per-row k nearest neighbours (self excluded), ascending.
struct NeighborTable {
  std::size_t k_max = 0;
  Norm norm = Norm::kEuclidean;
  std::vector<std::vector<Neighbor>> rows;
};

// Rows that duplicate an earlier row receive a seeded jitter of magnitude
// 1e-10 x (column range). Other rows are returned unchanged.
Dataset jitter_duplicates(const Dataset& data, std::uint64_t seed);

NeighborTable neighbor_table(const Dataset& data, std::size_t k_max, Norm norm,
                             NeighborSearch search);

// log of the unit-ball volume pi^{d/2} / Gamma(1 + d/2).
double log_unit_ball_volume(std::size_t d);

// -psi(k) + psi(n) + log V_d + (d/n) sum_i log R_{i,k}. Throws kInvalidInput
// unless 1 <= k <= n-1 and kDegenerate when some R_{i,k} is zero.
double kl_entropy(const Dataset& data, const KnnConfig& cfg);

// -psi(k) + psi(n) + (d-1)/k + (1/n) sum_i sum_j log R_{i,j}.
double ksg_entropy(const Dataset& data, const KnnConfig& cfg);

// Estimates from precomputed tables, for sweeping k without re-searching.
// `data` must be the (jittered) dataset the table was built from.
double kl_entropy_from(const Dataset& data, const NeighborTable& table, std::size_t k);
double ksg_entropy_from(const Dataset& data, const NeighborTable& table, std::size_t k,
                        KsgWidth width);

}  // namespace pss
