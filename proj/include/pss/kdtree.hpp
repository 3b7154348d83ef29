#pragma once

// Exact k-nearest-neighbour search over the rows of a Dataset, by k-d tree or
// by brute-force scan. Both paths order neighbours by (distance, row index) and
// compute distances with the same arithmetic, so their results are identical.

#include <cstddef>
#include <span>
#include <vector>

#include "pss/dataset.hpp"

namespace pss {

enum class Norm { kEuclidean, kMax };

struct Neighbor {
  double distance = 0.0;
  std::size_t index = 0;

  friend bool operator<(const Neighbor& a, const Neighbor& b) noexcept {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  }
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

double distance(std::span<const double> a, std::span<const double> b, Norm norm) noexcept;

class KdTree {
 public:
  // The tree keeps a reference to `data`; it must outlive the tree.
  explicit KdTree(const Dataset& data, std::size_t leaf_size = 16);

  // The k nearest rows to row `self`, excluding `self`, sorted ascending.
  std::vector<Neighbor> query(std::size_t self, std::size_t k, Norm norm) const;

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t axis = 0;
    double split = 0.0;
    std::size_t left = 0;   // 0 = leaf
    std::size_t right = 0;
  };

  std::size_t build(std::size_t begin, std::size_t end);
  void search(std::size_t node, std::span<const double> q, std::size_t self, std::size_t k,
              Norm norm, std::vector<Neighbor>& heap, std::vector<double>& offsets,
              double box_dist) const;

  const Dataset& data_;
  std::size_t leaf_size_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

std::vector<Neighbor> brute_force_query(const Dataset& data, std::size_t self, std::size_t k,
                                        Norm norm);

}  // namespace pss
