#include "pcb/graph.hpp"

#include <algorithm>
#include <cmath>

#include "pcb/error.hpp"
#include "pcb/parallel.hpp"

namespace pcb {
namespace {

// Composite Simpson on [0, 1].
template <typename F>
double simpson(F f, std::size_t intervals = 8192) {
  const double h = 1.0 / static_cast<double>(intervals);
  double s = f(0.0) + f(1.0);
  for (std::size_t k = 1; k < intervals; ++k) {
    s += (k % 2 ? 4.0 : 2.0) * f(static_cast<double>(k) * h);
  }
  return s * h / 3.0;
}

}  // namespace

Kernel Kernel::indicator(std::size_t dim) {
  if (dim == 0) throw Error("kernel dimension must be positive");
  return Kernel(Kind::indicator, dim, 1.0 / unit_ball_volume(dim), 1.0 / (static_cast<double>(dim) + 2.0));
}

Kernel Kernel::bump(std::size_t dim) {
  if (dim == 0) throw Error("kernel dimension must be positive");
  const double dd = static_cast<double>(dim);
  const double w = unit_ball_volume(dim);
  const double mass = dd * w * simpson([&](double t) {
    const double b = 1.0 - t * t;
    return b * b * std::pow(t, dd - 1.0);
  });
  const double second = w * simpson([&](double t) {
    const double b = 1.0 - t * t;
    return b * b * std::pow(t, dd + 1.0);
  });
  const double c = 1.0 / mass;
  return Kernel(Kind::bump, dim, c, c * second);
}

double Kernel::operator()(double t) const noexcept {
  if (t < 0.0 || t > 1.0) return 0.0;
  if (kind_ == Kind::indicator) return scale_;
  const double b = 1.0 - t * t;
  return scale_ * b * b;
}

// ---------------------------------------------------------------------------

Graph Graph::from_edges(std::size_t n, std::vector<Edge> edges) {
  for (const auto& e : edges) {
    if (e.i >= n || e.j >= n) throw Error("edge endpoint out of range");
    if (!(e.w >= 0.0) || !std::isfinite(e.w)) throw Error("edge weights must be finite and nonnegative");
  }
  std::erase_if(edges, [](const Edge& e) { return e.i == e.j; });
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.i < b.i || (a.i == b.i && a.j < b.j); });

  Graph g;
  g.offsets_.assign(n + 1, 0);
  for (std::size_t p = 0; p < edges.size();) {
    std::size_t q = p;
    double w = 0.0;
    while (q < edges.size() && edges[q].i == edges[p].i && edges[q].j == edges[p].j) w += edges[q++].w;
    g.cols_.push_back(edges[p].j);
    g.w_.push_back(w);
    ++g.offsets_[edges[p].i + 1];
    p = q;
  }
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.deg_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (double w : g.weights(i)) g.deg_[i] += w;
  }
  return g;
}

double Graph::weight(std::size_t i, std::size_t j) const {
  const auto nb = neighbors(i);
  const auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) return 0.0;
  return weights(i)[static_cast<std::size_t>(it - nb.begin())];
}

std::size_t Graph::isolated_count() const noexcept {
  std::size_t c = 0;
  for (std::size_t i = 0; i < size(); ++i) c += offsets_[i + 1] == offsets_[i] ? 1 : 0;
  return c;
}

bool Graph::is_symmetric(double rel_tol) const {
  for (std::size_t i = 0; i < size(); ++i) {
    const auto nb = neighbors(i);
    const auto w = weights(i);
    for (std::size_t p = 0; p < nb.size(); ++p) {
      const double back = weight(nb[p], i);
      if (std::abs(back - w[p]) > rel_tol * std::max(std::abs(back), std::abs(w[p]))) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

Graph build_epsilon_graph(const SpatialIndex& index, double eps, const Kernel& kernel) {
  if (!(eps > 0.0)) throw Error("graph radius eps must be positive");
  const auto& cloud = index.cloud();
  const std::size_t n = index.size();
  std::vector<std::vector<Edge>> rows(n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j : index.range_of(i, eps, false)) {
      const double dist = distance(cloud[i], cloud[j]);
      if (dist > 0.0) rows[i].push_back(Edge{i, j, kernel(dist / eps)});
    }
  });
  std::vector<Edge> edges;
  for (auto& r : rows) edges.insert(edges.end(), r.begin(), r.end());
  return Graph::from_edges(n, std::move(edges));
}

Graph build_knn_gaussian_graph(const SpatialIndex& index, std::size_t k) {
  const std::size_t n = index.size();
  if (k == 0 || k >= n) {
    throw Error("insufficient points: k = " + std::to_string(k) + " needs 1 <= k <= n - 1 with n = " +
                std::to_string(n));
  }
  std::vector<std::vector<Edge>> rows(n);
  parallel_for(n, [&](std::size_t i) {
    const auto nb = index.knn_of(i, k);
    const double ek = nb.back().distance;
    for (const auto& e : nb) {
      double w = 1.0;
      if (ek > 0.0) {
        w = std::exp(-4.0 * e.distance * e.distance / (ek * ek));
      } else if (e.distance > 0.0) {
        throw Error("zero k-th neighbour distance with a nonzero pair at point " + std::to_string(i));
      }
      rows[i].push_back(Edge{i, e.index, w});
    }
  });
  std::vector<Edge> edges;
  edges.reserve(2 * n * k);
  for (const auto& r : rows) {
    for (const auto& e : r) {
      edges.push_back(e);
      edges.push_back(Edge{e.j, e.i, e.w});
    }
  }
  return Graph::from_edges(n, std::move(edges));
}

// ---------------------------------------------------------------------------

double laplacian_scale(const Kernel& kernel, std::size_t n, double eps) {
  if (!(eps > 0.0)) throw Error("graph radius eps must be positive");
  const double d = static_cast<double>(kernel.dim());
  return 2.0 / (kernel.sigma() * static_cast<double>(n) * std::pow(eps, d + 2.0));
}

namespace {

void require_degrees(const Graph& graph) {
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (!(graph.degree(i) > 0.0)) {
      throw Error("node " + std::to_string(i) + " has zero degree; symmetric normalization undefined");
    }
  }
}

}  // namespace

std::vector<double> apply_laplacian(const Graph& graph, const Kernel& kernel, std::span<const double> u, double eps,
                                    Normalization normalization) {
  const std::size_t n = graph.size();
  if (u.size() != n) throw Error("function length differs from graph size");
  std::vector<double> out(n, 0.0);
  if (normalization == Normalization::unnormalized) {
    const double c = laplacian_scale(kernel, n, eps);
    parallel_for(n, [&](std::size_t i) {
      const auto nb = graph.neighbors(i);
      const auto w = graph.weights(i);
      double s = 0.0;
      for (std::size_t p = 0; p < nb.size(); ++p) s += w[p] * (u[nb[p]] - u[i]);
      out[i] = c * s;
    });
    return out;
  }
  require_degrees(graph);
  const auto& deg = graph.degrees();
  parallel_for(n, [&](std::size_t i) {
    const auto nb = graph.neighbors(i);
    const auto w = graph.weights(i);
    const double ui = u[i] / std::sqrt(deg[i]);
    double s = 0.0;
    for (std::size_t p = 0; p < nb.size(); ++p) s += w[p] * (ui - u[nb[p]] / std::sqrt(deg[nb[p]]));
    out[i] = s;
  });
  return out;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) s += values[p] * x[indices[p]];
    y[i] = s;
  }
  return y;
}

SparseMatrix laplacian_matrix(const Graph& graph, const Kernel& kernel, double eps, Normalization normalization) {
  const std::size_t n = graph.size();
  SparseMatrix a;
  a.cols = n;
  if (normalization == Normalization::symmetric) require_degrees(graph);
  const double c = normalization == Normalization::unnormalized ? laplacian_scale(kernel, n, eps) : 1.0;
  const auto& deg = graph.degrees();
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = graph.neighbors(i);
    const auto w = graph.weights(i);
    bool diag_done = false;
    const double diag = normalization == Normalization::unnormalized ? c * deg[i] : std::sqrt(deg[i]);
    for (std::size_t p = 0; p < nb.size(); ++p) {
      if (!diag_done && nb[p] > i) {
        a.push(i, diag);
        diag_done = true;
      }
      const double off = normalization == Normalization::unnormalized ? -c * w[p] : -w[p] / std::sqrt(deg[nb[p]]);
      a.push(nb[p], off);
    }
    if (!diag_done) a.push(i, diag);
    a.end_row();
  }
  return a;
}

}  // namespace pcb
