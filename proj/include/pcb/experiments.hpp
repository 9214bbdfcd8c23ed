#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcb/boundary.hpp"
#include "pcb/pointcloud.hpp"
#include "pcb/report.hpp"

namespace pcb {

nlohmann::json to_json(const Domain& domain);
nlohmann::json to_json(const Density& density);
/// Inverse of to_json for domains, e.g. {"kind":"ball","dim":2,"radius":0.5}.
Domain domain_from_json(const nlohmann::json& j);
Density density_from_json(const nlohmann::json& j);

/// Points whose metrics count: the annulus is restricted to |x| in [R1, R2 - r],
/// other domains keep every point.
std::vector<std::uint8_t> evaluation_mask(const Domain& domain, const PointCloud& cloud, double r);

/// u*(x) = sin(2 x1^2) - cos(2 x1^2), the Robin test solution on the unit disk.
double manufactured_solution(std::span<const double> x);
std::vector<double> manufactured_gradient(std::span<const double> x);
double manufactured_laplacian(std::span<const double> x);

/// First zero of J0.
inline constexpr double kJ0Root = 2.404825557695773;
/// J0(j0 |x|): principal Dirichlet eigenfunction of the unit disk, max 1.
double disk_eigenfunction(std::span<const double> x);

// ---------------------------------------------------------------------------

struct TfrSweepConfig {
  Domain domain = Domain::ball(2, 0.5);
  Density density = Density::uniform();
  std::size_t n = 4000;
  double eps = 0.03;
  std::vector<double> r_grid{0.18};
  std::vector<Order> orders{Order::first, Order::second};
  /// Also run the tests with ground-truth normals (t1st / t2nd).
  bool true_normals = true;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
};

/// Mean FNR / FPR / TFR per (r, order, normal source). Trial t uses seed + t.
/// Points without neighbours are counted in the `insufficient` column.
ExperimentReport run_tfr_sweep(const TfrSweepConfig& cfg);

struct ScalingConfig {
  Domain domain = Domain::ball(2, 0.5);
  Density density = Density::sinusoidal(2.0);
  std::vector<double> eps_grid{0.02, 0.03, 0.045, 0.065};
  double tfr_threshold = 0.005;
  std::size_t n_start = 500;
  std::size_t n_cap = 20000;
  std::size_t trials = 10;
  Order order = Order::first;
  std::uint64_t seed = 0;
};

/// Minimal n with mean TFR <= threshold at r = sqrt(eps), by doubling then
/// bisection. Rows reaching n_cap are marked censored and left out of the fit.
ExperimentReport run_scaling_sweep(const ScalingConfig& cfg);

/// Per-point (d_true, d_hat1, d_hat2) for points with d_true <= r inside the evaluation mask.
/// The summary holds error statistics for all listed points ("all") and for d_true <= eps ("strip").
ExperimentReport run_distance_scatter(const Domain& domain, const Density& density, std::size_t n, double eps,
                                      double r, std::uint64_t seed);

struct EikonalConvergenceConfig {
  Domain domain = Domain::box({1.0, 1.0});
  std::vector<std::size_t> n_grid{1024, 2048, 4096, 8192, 16384, 32768};
  std::size_t trials = 20;
  std::uint64_t seed = 0;
};

/// Graph eikonal distance to the detected boundary vs d_true. k = round(10 n^{1/5}),
/// boundary from second-order d_hat at the k-th neighbour radius with
/// 36 omega_d rho n eps_b^d = k, graph radius omega_d rho n eps^d = k. Uniform density.
ExperimentReport run_eikonal_convergence(const EikonalConvergenceConfig& cfg);

enum class SecondOrderProblem { robin, eigen };

struct SecondOrderConfig {
  SecondOrderProblem problem = SecondOrderProblem::robin;
  std::vector<std::size_t> n_grid{1024, 2048, 4096, 8192, 16384};
  std::size_t trials = 10;
  double robin_gamma = 0.5;
  std::uint64_t seed = 0;
};

/// Unit disk, uniform density, eps = (1/4)(log n / n)^{1/6}, k = round(2 pi n eps^2).
/// robin: u* = sin(2 x1^2) - cos(2 x1^2); eigen: J0(j0 |x|). Sup error vs eps with
/// the slope fitted over the last three grid points.
ExperimentReport run_secondorder_convergence(const SecondOrderConfig& cfg);

/// Quadrature d_bar per (point, r) against d_true <= d_bar <= d_true + (7 C_x / (R C_y) + 1 / R) r^2.
ExperimentReport population_bias_check(const Domain& domain, const Density& density, const std::vector<double>& r_grid,
                                       const std::vector<std::vector<double>>& points);

/// `count` points of the domain with d_true in [0, max_dist], deterministic in seed.
std::vector<std::vector<double>> near_boundary_points(const Domain& domain, std::size_t count, double max_dist,
                                                      std::uint64_t seed);

struct NormalOrderConfig {
  std::size_t n = 50000;
  /// Slab [0, 1] x [0, height], boundary face x2 = 0.
  double height = 0.5;
  /// rho proportional to exp(beta (x1 - 1/2) + alpha (x1 - 1/2) x2).
  double beta = 1.0;
  double alpha = 6.0;
  std::vector<double> r_grid{0.12, 0.16, 0.21, 0.28};
  double probe_depth = 0.005;
  double probe_halfwidth = 0.05;
  std::size_t trials = 160;
  std::uint64_t seed = 0;
};

/// Bias of first- and second-order normals at the flat face of a slab with
/// nonconstant density: |mean signed angle to the true normal| over probe
/// points and trials, per r, with log-log fits "first" and "second".
ExperimentReport normal_order_sweep(const NormalOrderConfig& cfg);

/// Monte Carlo |B(x, r) cap Omega| / |B(x, r)| at `points` points with d_true <= 2 eps.
ExperimentReport standardness_check(const Domain& domain, double r, double eps, std::size_t points,
                                    std::size_t samples, std::uint64_t seed);

/// Runs an experiment described by {"experiment": name, ...config fields}.
ExperimentReport run_experiment(const nlohmann::json& config);

}  // namespace pcb
