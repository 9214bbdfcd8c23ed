#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pcb/graph.hpp"
#include "pcb/normals.hpp"
#include "pcb/spatial.hpp"

namespace pcb {

struct PdeSolution {
  std::vector<double> u;
  /// Linear-system or eigen residual, or the DPP defect for eikonal solves.
  double residual = 0.0;
  std::optional<double> lambda;
  std::size_t iterations = 0;
  /// Eikonal nodes with no path to the boundary set (u = +inf).
  std::size_t unreachable = 0;
  /// Boundary rows whose normal was degenerate; their normal derivative is 0.
  std::size_t degenerate_normals = 0;
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Graph distance to `boundary` over edges 0 < |x_i - x_j| <= eps with length
/// |x_i - x_j|, by Dijkstra. Unreachable nodes get kUnreachable.
PdeSolution solve_eikonal(const SpatialIndex& index, double eps, std::span<const std::size_t> boundary);

/// Same over the edges of `graph`, with Euclidean edge lengths.
PdeSolution solve_eikonal(const Graph& graph, const PointCloud& cloud, std::span<const std::size_t> boundary);

/// max over reachable non-boundary nodes of |min_y {u(y) - u(x_i) + |y - x_i|}|
/// with y ranging over the punctured eps-ball.
double eikonal_dpp_defect(const SpatialIndex& index, double eps, std::span<const double> u,
                          std::span<const std::size_t> boundary);

/// (u(p(x_i + eps nu)) - u(x_i)) / eps, p the closest cloud point.
double normal_derivative(const SpatialIndex& index, std::span<const double> u, std::size_t i, double eps,
                         std::span<const double> nu);

/// Cloud point nearest to x_i + eps nu.
std::size_t normal_probe(const SpatialIndex& index, std::size_t i, double eps, std::span<const double> nu);

struct BoundaryConditions {
  std::vector<std::size_t> boundary;
  double robin_gamma = 1.0;
  /// Interior right-hand side, one value per point (boundary entries unused).
  std::vector<double> f;
  /// Boundary data, one value per point (interior entries unused).
  std::vector<double> g;
  /// Inward unit normal per point; only boundary entries are read, and only when gamma < 1.
  std::vector<NormalEstimate> normals;
};

/// Interior rows -L u = f (L the unnormalized graph Laplacian), boundary rows
/// gamma u - (1 - gamma) d_nu u = g. Throws ConvergenceError with the final
/// residual if the iterative solver fails.
PdeSolution solve_robin(const SpatialIndex& index, const Graph& graph, const Kernel& kernel, double eps,
                        const BoundaryConditions& bc, double tolerance = 1e-8);

/// Assembled Robin system matrix and right-hand side (for inspection and tests).
SparseMatrix robin_matrix(const SpatialIndex& index, const Graph& graph, const Kernel& kernel, double eps,
                          const BoundaryConditions& bc, std::vector<double>* rhs = nullptr,
                          std::size_t* degenerate = nullptr);

/// Smallest eigenpair of A u = lambda u on interior nodes with u = 0 on the
/// boundary set, A the nonnegative Laplacian (see laplacian_matrix). u is
/// positive with max u = 1.
PdeSolution solve_dirichlet_eigen(const Graph& graph, const Kernel& kernel, double eps,
                                  std::span<const std::size_t> boundary, Normalization normalization);

enum class DepthMethod { eikonal, eigen };

struct DepthResult {
  std::vector<std::size_t> ranking;  // decreasing depth
  std::vector<double> depth;
  std::vector<double> d_hat;
  std::vector<std::uint8_t> boundary;
  double lambda = 0.0;
};

/// Percentile boundary from second-order d_hat with r_i the k-th neighbour
/// distance, then depth on the symmetrized Gaussian k-NN graph. Unreachable
/// eikonal nodes rank last.
DepthResult depth_rank(const PointCloud& cloud, std::size_t k, double percent, DepthMethod method);

}  // namespace pcb
