#include "pcb/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>

#include "pcb/error.hpp"

namespace pcb {
namespace {

constexpr std::size_t kLeafSize = 16;

struct HeapEntry {
  double d2;
  std::size_t index;
  bool operator<(const HeapEntry& o) const { return d2 < o.d2 || (d2 == o.d2 && index < o.index); }
};

// Ascending index order. Large results use a linear bitmap pass instead of a comparison sort.
void sort_indices(std::vector<std::size_t>& v, std::size_t n) {
  if (v.size() * 16 < n) {
    std::sort(v.begin(), v.end());
    return;
  }
  std::vector<std::uint8_t> mark(n, 0);
  for (std::size_t j : v) mark[j] = 1;
  v.clear();
  for (std::size_t j = 0; j < n; ++j) {
    if (mark[j]) v.push_back(j);
  }
}

}  // namespace

SpatialIndex::SpatialIndex(PointCloud cloud) : cloud_(std::make_shared<const PointCloud>(std::move(cloud))) {
  build();
}

SpatialIndex::SpatialIndex(std::shared_ptr<const PointCloud> cloud) : cloud_(std::move(cloud)) {
  if (!cloud_) throw Error("spatial index needs a point cloud");
  build();
}

void SpatialIndex::build() {
  order_.resize(cloud_->size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.clear();
  nodes_.reserve(2 * (cloud_->size() / kLeafSize + 1));
  build_node(0, order_.size());
}

std::size_t SpatialIndex::build_node(std::size_t begin, std::size_t end) {
  const std::size_t d = dim();
  const std::size_t id = nodes_.size();
  nodes_.push_back(Node{begin, end, 0, 0, 0, 0.0});
  lo_.resize((id + 1) * d, std::numeric_limits<double>::infinity());
  hi_.resize((id + 1) * d, -std::numeric_limits<double>::infinity());
  for (std::size_t p = begin; p < end; ++p) {
    const auto x = (*cloud_)[order_[p]];
    for (std::size_t k = 0; k < d; ++k) {
      lo_[id * d + k] = std::min(lo_[id * d + k], x[k]);
      hi_[id * d + k] = std::max(hi_[id * d + k], x[k]);
    }
  }
  if (end - begin <= kLeafSize) return id;

  std::size_t split_dim = 0;
  double spread = -1.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double s = hi_[id * d + k] - lo_[id * d + k];
    if (s > spread) {
      spread = s;
      split_dim = k;
    }
  }
  if (spread <= 0.0) return id;  // all points coincide

  const std::size_t mid = begin + (end - begin) / 2;
  // Ties ordered by index keep the build deterministic across nth_element implementations.
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                     const double va = (*cloud_)[a][split_dim];
                     const double vb = (*cloud_)[b][split_dim];
                     return va < vb || (va == vb && a < b);
                   });
  const double split_value = (*cloud_)[order_[mid]][split_dim];
  const std::size_t left = build_node(begin, mid);
  const std::size_t right = build_node(mid, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  nodes_[id].split_dim = split_dim;
  nodes_[id].split_value = split_value;
  return id;
}

double SpatialIndex::box_distance2(std::size_t node, std::span<const double> x) const {
  const std::size_t d = dim();
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double lo = lo_[node * d + k];
    const double hi = hi_[node * d + k];
    const double t = x[k] < lo ? lo - x[k] : (x[k] > hi ? x[k] - hi : 0.0);
    s += t * t;
  }
  return s;
}

template <typename Visit>
void SpatialIndex::visit_range(std::span<const double> x, double r2, Visit&& visit) const {
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    if (box_distance2(id, x) > r2) continue;
    const Node& node = nodes_[id];
    if (node.left == 0) {
      for (std::size_t p = node.begin; p < node.end; ++p) {
        const std::size_t j = order_[p];
        const double d2 = squared_distance((*cloud_)[j], x);
        if (d2 <= r2) visit(j, d2);
      }
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
}

std::vector<std::size_t> SpatialIndex::range(std::span<const double> x, double r, bool include_self) const {
  std::vector<std::size_t> out;
  if (r < 0.0) return out;
  visit_range(x, r * r, [&](std::size_t j, double d2) {
    if (include_self || d2 > 0.0) out.push_back(j);
  });
  sort_indices(out, size());
  return out;
}

std::vector<std::size_t> SpatialIndex::range_of(std::size_t i, double r, bool include_self) const {
  std::vector<std::size_t> out;
  if (r < 0.0) return out;
  visit_range((*cloud_)[i], r * r, [&](std::size_t j, double) {
    if (include_self || j != i) out.push_back(j);
  });
  sort_indices(out, size());
  return out;
}

double SpatialIndex::far_distance2(std::size_t node, std::span<const double> x) const {
  const std::size_t d = dim();
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double t = std::max(x[k] - lo_[node * d + k], hi_[node * d + k] - x[k]);
    s += t * t;
  }
  return s;
}

std::size_t SpatialIndex::count(std::span<const double> x, double r) const {
  std::size_t c = 0;
  if (r < 0.0) return c;
  const double r2 = r * r;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    if (box_distance2(id, x) > r2) continue;
    const Node& node = nodes_[id];
    if (far_distance2(id, x) < r2) {
      // Whole box strictly inside; points on the sphere still take the exact test below.
      c += node.end - node.begin;
    } else if (node.left == 0) {
      for (std::size_t p = node.begin; p < node.end; ++p) {
        if (squared_distance((*cloud_)[order_[p]], x) <= r2) ++c;
      }
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
  return c;
}

std::vector<Neighbor> SpatialIndex::knn_impl(std::span<const double> x, std::size_t k, std::size_t skip) const {
  std::priority_queue<HeapEntry> heap;  // max-heap on (d2, index)
  if (k == 0) return {};
  auto worst = [&] { return heap.size() < k ? std::numeric_limits<double>::infinity() : heap.top().d2; };

  // Depth-first, nearer child first.
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t id = stack.back();
    stack.pop_back();
    if (box_distance2(id, x) > worst()) continue;
    const Node& node = nodes_[id];
    if (node.left == 0) {
      for (std::size_t p = node.begin; p < node.end; ++p) {
        const std::size_t j = order_[p];
        if (j == skip) continue;
        const HeapEntry e{squared_distance((*cloud_)[j], x), j};
        if (heap.size() < k) {
          heap.push(e);
        } else if (e < heap.top()) {
          heap.pop();
          heap.push(e);
        }
      }
    } else {
      const bool left_first = x[node.split_dim] < node.split_value;
      stack.push_back(left_first ? node.right : node.left);
      stack.push_back(left_first ? node.left : node.right);
    }
  }
  std::vector<Neighbor> out(heap.size());
  for (std::size_t p = out.size(); p-- > 0;) {
    out[p] = Neighbor{heap.top().index, std::sqrt(heap.top().d2)};
    heap.pop();
  }
  return out;
}

std::vector<Neighbor> SpatialIndex::knn(std::span<const double> x, std::size_t k) const {
  return knn_impl(x, k, std::numeric_limits<std::size_t>::max());
}

std::vector<Neighbor> SpatialIndex::knn_of(std::size_t i, std::size_t k) const {
  return knn_impl((*cloud_)[i], k, i);
}

std::size_t SpatialIndex::nearest(std::span<const double> x) const { return knn(x, 1).front().index; }

double SpatialIndex::kth_neighbor_distance(std::size_t i, std::size_t k) const {
  if (k == 0 || k >= size()) {
    throw Error("insufficient points: k = " + std::to_string(k) + " needs 1 <= k <= n - 1 with n = " +
                std::to_string(size()));
  }
  return knn_of(i, k).back().distance;
}

}  // namespace pcb
