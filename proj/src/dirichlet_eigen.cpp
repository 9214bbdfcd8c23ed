#include <algorithm>
#include <cmath>

#include "pcb/error.hpp"
#include "pcb/linear_solver.hpp"
#include "pcb/pde.hpp"

namespace pcb {
namespace {

constexpr std::size_t kMaxIterations = 500;
constexpr double kLambdaTol = 1e-8;
constexpr double kResidualTol = 1e-6;

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

PdeSolution solve_dirichlet_eigen(const Graph& graph, const Kernel& kernel, double eps,
                                  std::span<const std::size_t> boundary, Normalization normalization) {
  const std::size_t n = graph.size();
  std::vector<std::size_t> slot(n, 0);
  std::vector<std::uint8_t> is_boundary(n, 0);
  for (std::size_t b : boundary) {
    if (b >= n) throw Error("boundary index " + std::to_string(b) + " out of range");
    is_boundary[b] = 1;
  }
  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_boundary[i]) {
      slot[i] = interior.size();
      interior.push_back(i);
    }
  }
  if (interior.empty()) throw Error("Dirichlet eigenproblem has an empty interior");

  // Restrict the operator to interior rows and columns; boundary values are zero.
  const SparseMatrix full = laplacian_matrix(graph, kernel, eps, normalization);
  SparseMatrix a;
  a.cols = interior.size();
  for (std::size_t i : interior) {
    for (std::size_t p = full.offsets[i]; p < full.offsets[i + 1]; ++p) {
      if (!is_boundary[full.indices[p]]) a.push(slot[full.indices[p]], full.values[p]);
    }
    a.end_row();
  }

  const SparseSolver solver(a, 1e-9);
  std::vector<double> x(interior.size(), 1.0);
  double lambda = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  for (; it < kMaxIterations; ++it) {
    auto y = solver.solve(x).x;
    double yx = 0.0, yy = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      yx += y[k] * x[k];
      yy += y[k] * y[k];
    }
    if (!(yy > 0.0)) throw ConvergenceError("inverse iteration collapsed to zero", residual);
    lambda = yx / yy;
    // Sign so that the largest entry is positive, then scale to max 1.
    const auto big = std::max_element(y.begin(), y.end(), [](double p, double q) { return std::abs(p) < std::abs(q); });
    const double s = *big;
    for (double& v : y) v /= s;
    x = std::move(y);

    const auto ax = a.multiply(x);
    double r = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) r = std::max(r, std::abs(ax[k] - lambda * x[k]));
    residual = r / max_abs(x);
    if (std::abs(lambda - prev) <= kLambdaTol * std::abs(lambda) && residual <= kResidualTol) break;
    prev = lambda;
  }
  if (it == kMaxIterations) throw ConvergenceError("inverse iteration did not converge", residual);

  PdeSolution sol;
  sol.u.assign(n, 0.0);
  for (std::size_t k = 0; k < interior.size(); ++k) sol.u[interior[k]] = x[k];
  sol.lambda = lambda;
  sol.residual = residual;
  sol.iterations = it + 1;
  return sol;
}

}  // namespace pcb
