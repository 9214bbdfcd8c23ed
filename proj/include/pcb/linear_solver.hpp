#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pcb/graph.hpp"

namespace pcb {

struct SolveResult {
  std::vector<double> x;
  /// max |A x - b| / max |b|
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Preconditioned BiCGSTAB for square nonsymmetric sparse systems. The
/// preconditioner is built once and reused across right-hand sides.
/// Single-threaded, so repeated solves are bitwise reproducible.
class SparseSolver {
 public:
  /// max_iterations = 0 selects 50 n.
  explicit SparseSolver(const SparseMatrix& a, double tolerance = 1e-8, std::size_t max_iterations = 0);
  ~SparseSolver();
  SparseSolver(SparseSolver&&) noexcept;
  SparseSolver& operator=(SparseSolver&&) noexcept;

  /// Throws ConvergenceError unless max|A x - b| <= tolerance * max|b|.
  SolveResult solve(std::span<const double> b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SolveResult solve_sparse(const SparseMatrix& a, std::span<const double> b, double tolerance = 1e-8,
                         std::size_t max_iterations = 0);

}  // namespace pcb
