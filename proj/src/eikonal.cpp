#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

#include "pcb/error.hpp"
#include "pcb/pde.hpp"

namespace pcb {
namespace {

using Entry = std::pair<double, std::size_t>;

// Dijkstra keyed on (distance, index). `relax(i, visit)` calls visit(j, length)
// for every edge leaving i.
template <typename Relax>
PdeSolution dijkstra(std::size_t n, std::span<const std::size_t> boundary, Relax&& relax) {
  if (boundary.empty()) throw Error("eikonal solve needs a nonempty boundary set");
  PdeSolution sol;
  sol.u.assign(n, kUnreachable);
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::size_t b : boundary) {
    if (b >= n) throw Error("boundary index " + std::to_string(b) + " out of range");
    if (sol.u[b] != 0.0) {
      sol.u[b] = 0.0;
      heap.emplace(0.0, b);
    }
  }
  std::vector<std::uint8_t> done(n, 0);
  while (!heap.empty()) {
    const auto [du, i] = heap.top();
    heap.pop();
    if (done[i]) continue;
    done[i] = 1;
    relax(i, [&](std::size_t j, double len) {
      const double cand = du + len;
      if (cand < sol.u[j]) {
        sol.u[j] = cand;
        heap.emplace(cand, j);
      }
    });
  }
  sol.unreachable = static_cast<std::size_t>(std::count(sol.u.begin(), sol.u.end(), kUnreachable));
  return sol;
}

}  // namespace

PdeSolution solve_eikonal(const SpatialIndex& index, double eps, std::span<const std::size_t> boundary) {
  if (!(eps > 0.0)) throw Error("eikonal radius eps must be positive");
  const auto& cloud = index.cloud();
  auto sol = dijkstra(index.size(), boundary, [&](std::size_t i, auto&& visit) {
    for (std::size_t j : index.range_of(i, eps, false)) {
      const double len = distance(cloud[i], cloud[j]);
      if (len > 0.0) visit(j, len);
    }
  });
  sol.residual = eikonal_dpp_defect(index, eps, sol.u, boundary);
  return sol;
}

PdeSolution solve_eikonal(const Graph& graph, const PointCloud& cloud, std::span<const std::size_t> boundary) {
  if (graph.size() != cloud.size()) throw Error("graph and point cloud differ in size");
  return dijkstra(graph.size(), boundary, [&](std::size_t i, auto&& visit) {
    for (std::size_t j : graph.neighbors(i)) visit(j, distance(cloud[i], cloud[j]));
  });
}

double eikonal_dpp_defect(const SpatialIndex& index, double eps, std::span<const double> u,
                          std::span<const std::size_t> boundary) {
  const auto& cloud = index.cloud();
  std::vector<std::uint8_t> is_boundary(index.size(), 0);
  for (std::size_t b : boundary) is_boundary[b] = 1;
  double worst = 0.0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (is_boundary[i] || u[i] == kUnreachable) continue;
    double best = kUnreachable;
    for (std::size_t j : index.range_of(i, eps, false)) {
      const double len = distance(cloud[i], cloud[j]);
      if (len > 0.0 && u[j] != kUnreachable) best = std::min(best, u[j] - u[i] + len);
    }
    if (best != kUnreachable) worst = std::max(worst, std::abs(best));
  }
  return worst;
}

}  // namespace pcb
