#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pcb/pointcloud.hpp"

namespace pcb {

struct Neighbor {
  std::size_t index;
  double distance;
};

/// Exact range and k-nearest-neighbour queries over a point cloud, backed by a
/// kd-tree. Ball membership is closed: |x_i - x|^2 <= r^2. Immutable after
/// construction and safe to query from many threads.
class SpatialIndex {
 public:
  explicit SpatialIndex(PointCloud cloud);
  explicit SpatialIndex(std::shared_ptr<const PointCloud> cloud);

  const PointCloud& cloud() const noexcept { return *cloud_; }
  std::shared_ptr<const PointCloud> shared_cloud() const noexcept { return cloud_; }
  std::size_t size() const noexcept { return cloud_->size(); }
  std::size_t dim() const noexcept { return cloud_->dim(); }

  /// Indices within distance r of x, ascending. With include_self = false any
  /// point coinciding with x is dropped.
  std::vector<std::size_t> range(std::span<const double> x, double r, bool include_self = true) const;
  /// Indices within distance r of point i, ascending. include_self controls
  /// index i only; duplicates of x_i are kept.
  std::vector<std::size_t> range_of(std::size_t i, double r, bool include_self = true) const;
  /// Number of points within distance r of x (closed ball).
  std::size_t count(std::span<const double> x, double r) const;

  /// k nearest points to x ordered by (distance, index).
  std::vector<Neighbor> knn(std::span<const double> x, std::size_t k) const;
  /// k nearest points to x_i excluding index i itself.
  std::vector<Neighbor> knn_of(std::size_t i, std::size_t k) const;
  /// Nearest point to x; ties resolve to the smaller index.
  std::size_t nearest(std::span<const double> x) const;
  /// Distance from x_i to its k-th nearest other point. Throws
  /// pcb::Error("insufficient points") unless 1 <= k <= n - 1.
  double kth_neighbor_distance(std::size_t i, std::size_t k) const;

 private:
  struct Node {
    std::size_t begin, end;      // slice of order_
    std::size_t left, right;     // children, 0 for leaves
    std::size_t split_dim;
    double split_value;
  };

  void build();
  std::size_t build_node(std::size_t begin, std::size_t end);
  double box_distance2(std::size_t node, std::span<const double> x) const;
  double far_distance2(std::size_t node, std::span<const double> x) const;
  template <typename Visit>
  void visit_range(std::span<const double> x, double r2, Visit&& visit) const;
  std::vector<Neighbor> knn_impl(std::span<const double> x, std::size_t k, std::size_t skip) const;

  std::shared_ptr<const PointCloud> cloud_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::vector<double> lo_, hi_;  // per-node bounding boxes, dim entries each
};

}  // namespace pcb
