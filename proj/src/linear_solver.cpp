#include "pcb/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>

#include "pcb/error.hpp"

namespace pcb {
namespace {

using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

struct SparseSolver::Impl {
  Matrix a;         // row-equilibrated copy
  Vector row_scale;  // 1 / max |a_ij| per row
  double tolerance;
  std::size_t max_iterations;
  Eigen::BiCGSTAB<Matrix, Eigen::IncompleteLUT<double>> ilut;
  Eigen::BiCGSTAB<Matrix, Eigen::DiagonalPreconditioner<double>> jacobi;
  bool use_ilut = true;
};

SparseSolver::SparseSolver(const SparseMatrix& m, double tolerance, std::size_t max_iterations)
    : impl_(std::make_unique<Impl>()) {
  if (m.rows != m.cols) throw Error("linear system matrix must be square");
  if (m.rows == 0) throw Error("linear system is empty");
  const auto n = static_cast<Eigen::Index>(m.rows);
  impl_->tolerance = tolerance;
  impl_->max_iterations = max_iterations ? max_iterations : 50 * m.rows;
  impl_->row_scale.resize(n);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.values.size());
  for (std::size_t i = 0; i < m.rows; ++i) {
    double big = 0.0;
    for (std::size_t p = m.offsets[i]; p < m.offsets[i + 1]; ++p) big = std::max(big, std::abs(m.values[p]));
    if (!(big > 0.0)) throw Error("row " + std::to_string(i) + " of the linear system is zero");
    impl_->row_scale[static_cast<Eigen::Index>(i)] = 1.0 / big;
    for (std::size_t p = m.offsets[i]; p < m.offsets[i + 1]; ++p) {
      trip.emplace_back(static_cast<int>(i), static_cast<int>(m.indices[p]), m.values[p] / big);
    }
  }
  impl_->a.resize(n, n);
  impl_->a.setFromTriplets(trip.begin(), trip.end());
  impl_->a.makeCompressed();

  const auto iters = static_cast<Eigen::Index>(impl_->max_iterations);
  // |r|_inf <= |r|_2 <= inner |b|_2 <= inner sqrt(n) |b|_inf
  const double inner = tolerance / std::sqrt(static_cast<double>(m.rows));
  impl_->ilut.preconditioner().setDroptol(1e-6);
  impl_->ilut.preconditioner().setFillfactor(20);
  impl_->ilut.setTolerance(inner);
  impl_->ilut.setMaxIterations(iters);
  impl_->ilut.compute(impl_->a);
  if (impl_->ilut.info() != Eigen::Success) {
    impl_->use_ilut = false;
  }
  impl_->jacobi.setTolerance(inner);
  impl_->jacobi.setMaxIterations(iters);
  impl_->jacobi.compute(impl_->a);
}

SparseSolver::~SparseSolver() = default;
SparseSolver::SparseSolver(SparseSolver&&) noexcept = default;
SparseSolver& SparseSolver::operator=(SparseSolver&&) noexcept = default;

SolveResult SparseSolver::solve(std::span<const double> b_in) const {
  const auto n = impl_->a.rows();
  if (static_cast<Eigen::Index>(b_in.size()) != n) throw Error("right-hand side length differs from system size");
  Vector b(n);
  for (Eigen::Index i = 0; i < n; ++i) b[i] = b_in[static_cast<std::size_t>(i)] * impl_->row_scale[i];

  SolveResult out;
  out.x.assign(static_cast<std::size_t>(n), 0.0);
  const double bnorm = max_abs(b);
  // Residuals are measured on the original rows.
  auto residual_of = [&](const Vector& x) {
    const Vector r = ((impl_->a * x - b).array() / impl_->row_scale.array()).matrix();
    const Vector b0 = (b.array() / impl_->row_scale.array()).matrix();
    const double scale = max_abs(b0);
    return scale > 0.0 ? max_abs(r) / scale : max_abs(r);
  };
  if (bnorm == 0.0) return out;

  Vector x;
  std::size_t iterations = 0;
  double res = std::numeric_limits<double>::infinity();
  if (impl_->use_ilut) {
    x = impl_->ilut.solve(b);
    iterations = static_cast<std::size_t>(impl_->ilut.iterations());
    // A couple of refinement sweeps recover digits lost to stagnation.
    for (int round = 0; round < 3 && x.allFinite(); ++round) {
      res = residual_of(x);
      if (res <= impl_->tolerance) break;
      const Vector r = b - impl_->a * x;
      x += impl_->ilut.solve(r);
      iterations += static_cast<std::size_t>(impl_->ilut.iterations());
    }
    if (x.allFinite()) res = residual_of(x);
  }
  if (!(res <= impl_->tolerance)) {
    Vector y = impl_->jacobi.solve(b);
    iterations += static_cast<std::size_t>(impl_->jacobi.iterations());
    if (y.allFinite()) {
      const double ry = residual_of(y);
      if (ry < res) {
        res = ry;
        x = std::move(y);
      }
    }
  }
  if (!(res <= impl_->tolerance)) throw ConvergenceError("linear solver did not converge", res);
  for (Eigen::Index i = 0; i < n; ++i) out.x[static_cast<std::size_t>(i)] = x[i];
  out.residual = res;
  out.iterations = iterations;
  return out;
}

SolveResult solve_sparse(const SparseMatrix& a, std::span<const double> b, double tolerance,
                         std::size_t max_iterations) {
  return SparseSolver(a, tolerance, max_iterations).solve(b);
}

}  // namespace pcb
