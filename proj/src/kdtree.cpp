#include "pss/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pss/error.hpp"

namespace pss {
namespace {

// Lower bounds are computed from per-axis offsets and can round a hair above
// an exactly tied true distance; pruning only beyond this slack keeps ties.
constexpr double kPruneSlack = 1e-12;

void push_candidate(std::vector<Neighbor>& heap, std::size_t k, Neighbor cand) {
  if (heap.size() < k) {
    heap.push_back(cand);
    std::push_heap(heap.begin(), heap.end());
  } else if (cand < heap.front()) {
    std::pop_heap(heap.begin(), heap.end());
    heap.back() = cand;
    std::push_heap(heap.begin(), heap.end());
  }
}

}  // namespace

double distance(std::span<const double> a, std::span<const double> b, Norm norm) noexcept {
  if (norm == Norm::kMax) {
    double best = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) best = std::max(best, std::abs(a[j] - b[j]));
    return best;
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

KdTree::KdTree(const Dataset& data, std::size_t leaf_size)
    : data_(data), leaf_size_(std::max<std::size_t>(leaf_size, 1)), order_(data.rows()) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * data.rows() / leaf_size_ + 2);
  if (data.rows() > 0) build(0, data.rows());
}

std::size_t KdTree::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back({begin, end, 0, 0.0, 0, 0});
  if (end - begin <= leaf_size_) return id;

  std::size_t axis = 0;
  double widest = -1.0;
  for (std::size_t j = 0; j < data_.cols(); ++j) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = data_(order_[i], j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = j;
    }
  }
  if (widest <= 0.0) return id;  // all points coincide; keep as a leaf

  const std::size_t mid = begin + (end - begin) / 2;
  auto first = order_.begin() + static_cast<std::ptrdiff_t>(begin);
  std::nth_element(first, order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return data_(a, axis) < data_(b, axis); });
  const double split = data_(order_[mid], axis);

  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(std::size_t node_id, std::span<const double> q, std::size_t self,
                    std::size_t k, Norm norm, std::vector<Neighbor>& heap,
                    std::vector<double>& offsets, double box_dist) const {
  const Node& node = nodes_[node_id];
  if (node.left == 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t row = order_[i];
      if (row == self) continue;
      push_candidate(heap, k, {distance(q, data_.row(row), norm), row});
    }
    return;
  }

  const double diff = q[node.axis] - node.split;
  const std::size_t near = diff < 0.0 ? node.left : node.right;
  const std::size_t far = diff < 0.0 ? node.right : node.left;
  search(near, q, self, k, norm, heap, offsets, box_dist);

  const double old_offset = offsets[node.axis];
  double far_dist = 0.0;
  if (norm == Norm::kEuclidean) {
    far_dist = box_dist - old_offset * old_offset + diff * diff;
  } else {
    offsets[node.axis] = std::abs(diff);
    far_dist = *std::max_element(offsets.begin(), offsets.end());
    offsets[node.axis] = old_offset;
  }
  if (heap.size() == k) {
    const double worst = heap.front().distance;
    const double bound = norm == Norm::kEuclidean ? worst * worst : worst;
    if (far_dist > bound * (1.0 + kPruneSlack)) return;
  }
  offsets[node.axis] = std::abs(diff);
  search(far, q, self, k, norm, heap, offsets, far_dist);
  offsets[node.axis] = old_offset;
}

std::vector<Neighbor> KdTree::query(std::size_t self, std::size_t k, Norm norm) const {
  if (k == 0 || k >= data_.rows()) throw_invalid("neighbour order k must lie in [1, n-1]");
  std::vector<Neighbor> heap;
  heap.reserve(k + 1);
  std::vector<double> offsets(data_.cols(), 0.0);
  search(0, data_.row(self), self, k, norm, heap, offsets, 0.0);
  std::sort_heap(heap.begin(), heap.end());
  return heap;
}

std::vector<Neighbor> brute_force_query(const Dataset& data, std::size_t self, std::size_t k,
                                        Norm norm) {
  if (k == 0 || k >= data.rows()) throw_invalid("neighbour order k must lie in [1, n-1]");
  std::vector<Neighbor> heap;
  heap.reserve(k + 1);
  const auto q = data.row(self);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    if (r == self) continue;
    push_candidate(heap, k, {distance(q, data.row(r), norm), r});
  }
  std::sort_heap(heap.begin(), heap.end());
  return heap;
}

}  // namespace pss
