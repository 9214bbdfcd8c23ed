#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcb/normals.hpp"
#include "pcb/pointcloud.hpp"
#include "pcb/spatial.hpp"

namespace pcb {

/// Per-point distance-to-boundary estimates.
struct DistanceEstimate {
  std::vector<double> d_hat;
  /// Index of the maximizing neighbour, or the point itself when the normal
  /// was degenerate or the neighbourhood empty.
  std::vector<std::size_t> argmax;
  Order order = Order::first;
  /// Points whose punctured neighbourhood was empty (flag policy only).
  std::vector<std::size_t> insufficient;
};

enum class NeighborPolicy { raise, flag };

/// max_j (x_i - x_j) . nu(x_i) over 0 < |x_j - x_i| <= r, with nu the first-order
/// estimate. Returns r for a degenerate normal. Throws InsufficientNeighbors
/// when no other point lies within r.
double distance_first_order(const SpatialIndex& index, std::size_t i, double r);

/// Second-order estimate with the sign cutoff, using second-order normals at
/// x_i and at every neighbour.
double distance_second_order(const SpatialIndex& index, std::size_t i, double r);

/// Distance estimate at x_i from precomputed normals (one per point). With
/// Order::second the neighbour normals enter through the averaged bracket.
double distance_from_normals(const SpatialIndex& index, std::size_t i, double r,
                             std::span<const NormalEstimate> normals, Order order,
                             std::size_t* argmax = nullptr);

/// Distances for every point. Normals are estimated with the same radii unless
/// `normals` is supplied (for example ground-truth normals). Under the flag
/// policy a point without neighbours gets d_hat = r and is listed.
DistanceEstimate estimate_distances(const SpatialIndex& index, const Radii& radii, Order order,
                                    NeighborPolicy policy = NeighborPolicy::raise,
                                    std::span<const NormalEstimate> normals = {});

struct BoundaryLabel {
  std::vector<std::uint8_t> label;
  double threshold = 0.0;
  /// Boundary width: the input eps, or the width implied by a percentile.
  double eps = 0.0;
};

/// label 1 iff d_hat < 3 eps / 2.
BoundaryLabel boundary_test(std::span<const double> d_hat, double eps);

/// Labels the ceil(p n / 100) smallest d_hat (ties to the smaller index) and
/// reports eps = (2/3) * (largest selected d_hat).
BoundaryLabel boundary_percentile(std::span<const double> d_hat, double percent);

struct TheoryConstants {
  std::size_t dim = 0;
  double reach = 0.0;
  double C_x = 0.0;
  double C_y = 0.0;
  double C_r = 0.0;
  double C_eps = 0.0;
  double prob_exponent = 0.0;
};

/// Constants of the boundary-test error bounds with the simplified
/// C_y = omega_{d-1} / (2 (d + 1)).
TheoryConstants theory_constants(std::size_t d, double reach, double lipschitz, double rho_min, double rho_max,
                                 double prob_exponent);
TheoryConstants theory_constants(const Domain& domain, const Density& density, double prob_exponent);

/// Position-dependent C_y = omega_{d-1} (1 - (dist / r - r / R)^2)^{(d+1)/2} / (d + 1).
double c_y_full(std::size_t d, double dist, double r, double reach);

enum class Flag { no, yes, unknown };
std::string to_string(Flag f);

struct TestParams {
  double r = 0.0;
  double eps = 0.0;
  /// eps / r <= 1 / (3 sqrt d)
  Flag a1 = Flag::unknown;
  /// r^2 <= R eps
  Flag a2 = Flag::unknown;
};

/// eps = R C_eps (log n / n)^{2/(d+2)} and r = R C_r (log n / n)^{1/(d+2)}.
TestParams recommended_params(const TheoryConstants& c, std::size_t n, double reach);

/// Assumption flags for a given (eps, r); unknown when reach is absent.
TestParams assess_params(std::size_t d, double r, double eps, std::optional<double> reach);

/// Smallest radius giving every point at least k0 other points within it.
double default_radius(const SpatialIndex& index, std::size_t k0 = 10);

struct DetectionMetrics {
  std::size_t BP = 0, FP = 0, FN = 0, P = 0, N = 0;
  double FNR = 0.0, FPR = 0.0, TFR = 0.0;
};

/// BP = #{d <= eps}, FP = #{label 1, d > 2 eps}, FN = #{label 0, d <= eps}.
/// Only points with mask[i] != 0 count when a mask is given. Throws when BP = 0.
DetectionMetrics detection_metrics(std::span<const std::uint8_t> labels, std::span<const double> true_dist,
                                   double eps, std::span<const std::uint8_t> mask = {});

}  // namespace pcb
