#include "pcb/error.hpp"
#include "pcb/linear_solver.hpp"
#include "pcb/pde.hpp"

namespace pcb {

std::size_t normal_probe(const SpatialIndex& index, std::size_t i, double eps, std::span<const double> nu) {
  const auto xi = index.cloud()[i];
  std::vector<double> y(xi.begin(), xi.end());
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += eps * nu[k];
  return index.nearest(y);
}

double normal_derivative(const SpatialIndex& index, std::span<const double> u, std::size_t i, double eps,
                         std::span<const double> nu) {
  if (!(eps > 0.0)) throw Error("normal derivative step eps must be positive");
  if (!(norm(nu) > 0.0)) throw Error("normal derivative needs a nondegenerate normal at point " + std::to_string(i));
  return (u[normal_probe(index, i, eps, nu)] - u[i]) / eps;
}

SparseMatrix robin_matrix(const SpatialIndex& index, const Graph& graph, const Kernel& kernel, double eps,
                          const BoundaryConditions& bc, std::vector<double>* rhs, std::size_t* degenerate) {
  const std::size_t n = graph.size();
  if (index.size() != n) throw Error("graph and point cloud differ in size");
  if (bc.boundary.empty()) throw Error("Robin problem needs a nonempty boundary set");
  const double gamma = bc.robin_gamma;
  if (!(gamma > 0.0 && gamma <= 1.0)) throw Error("Robin gamma must lie in (0, 1]; the pure Neumann case is excluded");
  if (bc.f.size() != n || bc.g.size() != n) throw Error("f and g need one value per point");
  if (gamma < 1.0 && bc.normals.size() != n) throw Error("Robin gamma < 1 needs one normal per point");

  std::vector<std::uint8_t> is_boundary(n, 0);
  for (std::size_t b : bc.boundary) {
    if (b >= n) throw Error("boundary index " + std::to_string(b) + " out of range");
    is_boundary[b] = 1;
  }

  const SparseMatrix lap = laplacian_matrix(graph, kernel, eps, Normalization::unnormalized);
  SparseMatrix a;
  a.cols = n;
  if (rhs) rhs->assign(n, 0.0);
  std::size_t degen = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_boundary[i]) {
      for (std::size_t p = lap.offsets[i]; p < lap.offsets[i + 1]; ++p) a.push(lap.indices[p], lap.values[p]);
      if (rhs) (*rhs)[i] = bc.f[i];
    } else if (gamma == 1.0) {
      a.push(i, 1.0);
      if (rhs) (*rhs)[i] = bc.g[i];
    } else {
      const auto& nu = bc.normals[i];
      if (nu.degenerate) {
        ++degen;
        a.push(i, gamma);
      } else {
        const std::size_t p = normal_probe(index, i, eps, nu.nu);
        const double c = (1.0 - gamma) / eps;
        if (p == i) {
          a.push(i, gamma);
        } else if (p < i) {
          a.push(p, -c);
          a.push(i, gamma + c);
        } else {
          a.push(i, gamma + c);
          a.push(p, -c);
        }
      }
      if (rhs) (*rhs)[i] = bc.g[i];
    }
    a.end_row();
  }
  if (degenerate) *degenerate = degen;
  return a;
}

PdeSolution solve_robin(const SpatialIndex& index, const Graph& graph, const Kernel& kernel, double eps,
                        const BoundaryConditions& bc, double tolerance) {
  std::vector<double> rhs;
  PdeSolution sol;
  const SparseMatrix a = robin_matrix(index, graph, kernel, eps, bc, &rhs, &sol.degenerate_normals);
  auto res = solve_sparse(a, rhs, tolerance);
  sol.u = std::move(res.x);
  sol.residual = res.residual;
  sol.iterations = res.iterations;
  return sol;
}

}  // namespace pcb
