#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pcb/pointcloud.hpp"

namespace pcb {

/// Population-level counterparts of the sample estimators, by midpoint
/// quadrature on a grid over B(x0, r) aligned with the radial direction at x0
/// (axis-aligned for boxes). Grids are refined by halving the spacing until
/// successive results agree to `tolerance` or `max_cells` per axis is reached.
class PopulationOracle {
 public:
  using DensityFn = std::function<double(std::span<const double>)>;

  PopulationOracle(Domain domain, const Density& density, double tolerance = 1e-6, std::size_t min_cells = 32,
                   std::size_t max_cells = 1024);
  PopulationOracle(Domain domain, DensityFn density, double tolerance = 1e-6, std::size_t min_cells = 32,
                   std::size_t max_cells = 1024);

  struct Result {
    std::vector<double> value;
    std::size_t cells = 0;
    /// Direction change (radians) or relative change at the last halving.
    double change = 0.0;
    bool converged = false;
  };

  /// integral over B(x0, r) cap Omega of (x - x0) rho(x) dx
  Result v_bar(std::span<const double> x0, double r) const;
  /// Same with weight rho / theta, theta evaluated on a fixed grid of `theta_cells` per axis.
  Result v_bar_n(std::span<const double> x0, double r, std::size_t theta_cells = 48) const;
  /// (2/r)^d / omega_d times the mass of B(x, r/2) cap Omega.
  double theta(std::span<const double> x, double r, std::size_t cells = 64) const;
  /// max over B(x0, r) cap Omega of (x0 - x) . nu_bar, exact for balls and annuli.
  double d_bar(std::span<const double> x0, double r) const;
  /// max of (x0 - x) . nu over the closed set, for a given unit nu.
  double max_projection(std::span<const double> x0, double r, std::span<const double> nu) const;

  const Domain& domain() const noexcept { return domain_; }

 private:
  std::vector<std::vector<double>> frame(std::span<const double> x0) const;
  template <typename Weight>
  std::vector<double> integrate(std::span<const double> x0, double r, std::size_t cells, Weight&& weight) const;

  Domain domain_;
  DensityFn density_;
  double tolerance_;
  std::size_t min_cells_, max_cells_;
};

/// Fraction of B(x0, r) lying in the domain, by Monte Carlo with `samples` draws.
double ball_fraction_inside(const Domain& domain, std::span<const double> x0, double r, std::size_t samples,
                            std::uint64_t seed);

}  // namespace pcb
