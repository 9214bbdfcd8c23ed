#include <algorithm>
#include <numeric>

#include "pcb/boundary.hpp"
#include "pcb/error.hpp"
#include "pcb/parallel.hpp"
#include "pcb/pde.hpp"

namespace pcb {

DepthResult depth_rank(const PointCloud& cloud, std::size_t k, double percent, DepthMethod method) {
  if (k == 0) throw Error("depth needs k >= 1");
  if (!(percent > 0.0 && percent <= 100.0)) throw Error("percentile must lie in (0, 100]");
  const SpatialIndex index(cloud);
  const std::size_t n = index.size();
  if (k >= n) throw Error("insufficient points: k = " + std::to_string(k) + " needs n > k");

  std::vector<double> radii(n);
  parallel_for(n, [&](std::size_t i) { radii[i] = index.kth_neighbor_distance(i, k); });
  for (std::size_t i = 0; i < n; ++i) {
    if (!(radii[i] > 0.0)) throw InsufficientNeighbors(i);
  }

  DepthResult out;
  out.d_hat = estimate_distances(index, Radii(radii), Order::second, NeighborPolicy::flag).d_hat;
  const auto labels = boundary_percentile(out.d_hat, percent);
  out.boundary = labels.label;
  std::vector<std::size_t> boundary;
  for (std::size_t i = 0; i < n; ++i) {
    if (out.boundary[i]) boundary.push_back(i);
  }

  const Graph graph = build_knn_gaussian_graph(index, k);
  if (method == DepthMethod::eikonal) {
    out.depth = solve_eikonal(graph, cloud, boundary).u;
  } else {
    const auto sol = solve_dirichlet_eigen(graph, Kernel::indicator(cloud.dim()), 1.0, boundary,
                                           Normalization::symmetric);
    out.depth = sol.u;
    out.lambda = *sol.lambda;
  }

  out.ranking.resize(n);
  std::iota(out.ranking.begin(), out.ranking.end(), std::size_t{0});
  auto key = [&](std::size_t i) { return out.depth[i] == kUnreachable ? -1.0 : out.depth[i]; };
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
  return out;
}

}  // namespace pcb
