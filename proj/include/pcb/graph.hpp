#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pcb/spatial.hpp"

namespace pcb {

/// Radial profile eta on [0, 1] with integral over R^d equal to one.
class Kernel {
 public:
  enum class Kind { indicator, bump };

  /// eta = 1 / omega_d on [0, 1]; sigma = 1 / (d + 2).
  static Kernel indicator(std::size_t dim);
  /// eta = c (1 - t^2)^2 on [0, 1], c and sigma by quadrature.
  static Kernel bump(std::size_t dim);

  Kind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  /// sigma_eta = integral of eta(|z|) z_1^2 over R^d.
  double sigma() const noexcept { return sigma_; }
  double operator()(double t) const noexcept;

 private:
  Kernel(Kind kind, std::size_t dim, double scale, double sigma)
      : kind_(kind), dim_(dim), scale_(scale), sigma_(sigma) {}
  Kind kind_;
  std::size_t dim_;
  double scale_;
  double sigma_;
};

struct Edge {
  std::size_t i, j;
  double w;
};

/// Weighted graph in compressed row form. Rows list neighbours in ascending
/// index order; there are no self loops.
class Graph {
 public:
  Graph() = default;
  /// Duplicate (i, j) pairs are summed and self loops dropped. No symmetrization.
  static Graph from_edges(std::size_t n, std::vector<Edge> edges);

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return cols_.size(); }
  std::span<const std::size_t> neighbors(std::size_t i) const noexcept {
    return {cols_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> weights(std::size_t i) const noexcept {
    return {w_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  double degree(std::size_t i) const noexcept { return deg_[i]; }
  const std::vector<double>& degrees() const noexcept { return deg_; }
  /// Weight of edge (i, j), 0 when absent.
  double weight(std::size_t i, std::size_t j) const;
  std::size_t isolated_count() const noexcept;
  bool is_symmetric(double rel_tol = 0.0) const;

 private:
  std::vector<std::size_t> offsets_, cols_;
  std::vector<double> w_, deg_;
};

/// Edges for 0 < |x_i - x_j| <= eps with weight eta(|x_i - x_j| / eps).
Graph build_epsilon_graph(const SpatialIndex& index, double eps, const Kernel& kernel);

/// k-nearest-neighbour graph with w_ij = exp(-4 |x_i - x_j|^2 / eps_k(x_i)^2),
/// symmetrized as W + W^T.
Graph build_knn_gaussian_graph(const SpatialIndex& index, std::size_t k);

enum class Normalization { unnormalized, symmetric };

/// unnormalized: 2 / (sigma n eps^{d+2}) sum_j w_ij (u_j - u_i)
/// symmetric:    sum_j w_ij (u_i / sqrt(d_i) - u_j / sqrt(d_j))
/// kernel and eps are ignored for the symmetric form.
std::vector<double> apply_laplacian(const Graph& graph, const Kernel& kernel, std::span<const double> u, double eps,
                                    Normalization normalization);

/// Compressed-row sparse matrix.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> indices;
  std::vector<double> values;

  void push(std::size_t col, double value) {
    indices.push_back(col);
    values.push_back(value);
  }
  void end_row() {
    offsets.push_back(indices.size());
    ++rows;
  }
  std::vector<double> multiply(std::span<const double> x) const;
};

/// Nonnegative operator A whose eigenvalues are >= 0: -L for the unnormalized
/// Laplacian, the symmetric form as is. Row i of A u equals -(L u)_i or (L u)_i.
SparseMatrix laplacian_matrix(const Graph& graph, const Kernel& kernel, double eps, Normalization normalization);

/// Scale 2 / (sigma n eps^{d+2}) of the unnormalized Laplacian.
double laplacian_scale(const Kernel& kernel, std::size_t n, double eps);

}  // namespace pcb
