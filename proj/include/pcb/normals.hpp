#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "pcb/spatial.hpp"

namespace pcb {

enum class Order { first, second };

/// Raw normal vector estimate v and its unit direction nu = v / |v|.
/// Degenerate when |v| < 1e-14 r; nu is then the zero vector.
struct NormalEstimate {
  std::vector<double> v;
  std::vector<double> nu;
  double magnitude = 0.0;
  bool degenerate = true;
  Order order = Order::first;
};

/// Neighbourhood radius, either one value for every point or one per point.
class Radii {
 public:
  Radii(double r) : value_(r) {}  // NOLINT(google-explicit-constructor)
  explicit Radii(std::vector<double> per_point) : value_(std::move(per_point)) {}

  double operator[](std::size_t i) const {
    if (const auto* r = std::get_if<double>(&value_)) return *r;
    return std::get<std::vector<double>>(value_)[i];
  }
  bool is_constant() const noexcept { return std::holds_alternative<double>(value_); }

 private:
  std::variant<double, std::vector<double>> value_;
};

/// Builds an estimate from a raw vector, applying the degeneracy rule.
NormalEstimate make_normal_estimate(std::vector<double> v, double r, Order order);

/// v = (1/n) sum_{|x_j - x_i| <= r} (x_j - x_i), summed in ascending neighbour order.
NormalEstimate first_order_normal(const SpatialIndex& index, std::size_t i, double r);

/// Kernel density surrogate (2/r)^d #{j : |x_j - x_i| <= r/2} / (omega_d n); the
/// point itself is counted.
double theta_hat(const SpatialIndex& index, std::size_t i, double r);
std::vector<double> theta_hat_all(const SpatialIndex& index, const Radii& radii);

/// v = (1/n) sum_{|x_j - x_i| <= r} (x_j - x_i) / theta_hat(x_j), with theta_hat at radius r.
NormalEstimate second_order_normal(const SpatialIndex& index, std::size_t i, double r);
/// Same, using precomputed theta_hat values (one per point).
NormalEstimate second_order_normal(const SpatialIndex& index, std::size_t i, double r, std::span<const double> theta);

/// Normals at every point. For the second order with per-point radii,
/// theta_hat(x_j) is evaluated with x_j's own radius.
std::vector<NormalEstimate> estimate_normals(const SpatialIndex& index, const Radii& radii, Order order);

/// nu_s(x_i) = normalize(sum of nu(x_j) over |x_j - x_i| <= r_s), skipping
/// degenerate inputs. Degenerate sums are flagged.
std::vector<NormalEstimate> smooth_normals(const SpatialIndex& index, std::span<const NormalEstimate> normals,
                                           double r_s);

/// Wraps known unit normals (e.g. ground truth) as estimates.
std::vector<NormalEstimate> normals_from_vectors(const std::vector<std::vector<double>>& unit_normals, Order order);

/// Angle in radians between two unit vectors.
double angle_between(std::span<const double> a, std::span<const double> b);

}  // namespace pcb
