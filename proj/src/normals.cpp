#include "pcb/normals.hpp"

#include <algorithm>
#include <cmath>

#include "pcb/error.hpp"
#include "pcb/parallel.hpp"

namespace pcb {

NormalEstimate make_normal_estimate(std::vector<double> v, double r, Order order) {
  NormalEstimate est;
  est.order = order;
  est.magnitude = norm(v);
  est.degenerate = !(est.magnitude >= 1e-14 * r);
  est.nu.assign(v.size(), 0.0);
  if (!est.degenerate) {
    for (std::size_t k = 0; k < v.size(); ++k) est.nu[k] = v[k] / est.magnitude;
  }
  est.v = std::move(v);
  return est;
}

NormalEstimate first_order_normal(const SpatialIndex& index, std::size_t i, double r) {
  if (!(r > 0.0)) throw Error("normal estimation radius must be positive");
  const auto& cloud = index.cloud();
  const auto xi = cloud[i];
  std::vector<double> v(cloud.dim(), 0.0);
  for (std::size_t j : index.range_of(i, r)) {
    const auto xj = cloud[j];
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += xj[k] - xi[k];
  }
  const double inv_n = 1.0 / static_cast<double>(cloud.size());
  for (double& c : v) c *= inv_n;
  return make_normal_estimate(std::move(v), r, Order::first);
}

double theta_hat(const SpatialIndex& index, std::size_t i, double r) {
  if (!(r > 0.0)) throw Error("density estimation radius must be positive");
  const auto& cloud = index.cloud();
  const double d = static_cast<double>(cloud.dim());
  const double count = static_cast<double>(index.count(cloud[i], 0.5 * r));
  return std::pow(2.0 / r, d) * count / (unit_ball_volume(cloud.dim()) * static_cast<double>(cloud.size()));
}

std::vector<double> theta_hat_all(const SpatialIndex& index, const Radii& radii) {
  std::vector<double> theta(index.size());
  parallel_for(index.size(), [&](std::size_t i) { theta[i] = theta_hat(index, i, radii[i]); });
  return theta;
}

NormalEstimate second_order_normal(const SpatialIndex& index, std::size_t i, double r,
                                   std::span<const double> theta) {
  if (!(r > 0.0)) throw Error("normal estimation radius must be positive");
  const auto& cloud = index.cloud();
  const auto xi = cloud[i];
  std::vector<double> v(cloud.dim(), 0.0);
  for (std::size_t j : index.range_of(i, r)) {
    if (j == i) continue;
    const auto xj = cloud[j];
    const double w = 1.0 / theta[j];
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += w * (xj[k] - xi[k]);
  }
  const double inv_n = 1.0 / static_cast<double>(cloud.size());
  for (double& c : v) c *= inv_n;
  return make_normal_estimate(std::move(v), r, Order::second);
}

NormalEstimate second_order_normal(const SpatialIndex& index, std::size_t i, double r) {
  if (!(r > 0.0)) throw Error("normal estimation radius must be positive");
  const auto& cloud = index.cloud();
  const auto xi = cloud[i];
  std::vector<double> v(cloud.dim(), 0.0);
  for (std::size_t j : index.range_of(i, r)) {
    if (j == i) continue;
    const auto xj = cloud[j];
    const double w = 1.0 / theta_hat(index, j, r);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += w * (xj[k] - xi[k]);
  }
  const double inv_n = 1.0 / static_cast<double>(cloud.size());
  for (double& c : v) c *= inv_n;
  return make_normal_estimate(std::move(v), r, Order::second);
}

std::vector<NormalEstimate> estimate_normals(const SpatialIndex& index, const Radii& radii, Order order) {
  std::vector<NormalEstimate> out(index.size());
  if (order == Order::first) {
    parallel_for(index.size(), [&](std::size_t i) { out[i] = first_order_normal(index, i, radii[i]); });
    return out;
  }
  const auto theta = theta_hat_all(index, radii);
  parallel_for(index.size(), [&](std::size_t i) { out[i] = second_order_normal(index, i, radii[i], theta); });
  return out;
}

std::vector<NormalEstimate> smooth_normals(const SpatialIndex& index, std::span<const NormalEstimate> normals,
                                           double r_s) {
  if (normals.size() != index.size()) throw Error("one normal per point is required for smoothing");
  std::vector<NormalEstimate> out(index.size());
  parallel_for(index.size(), [&](std::size_t i) {
    std::vector<double> sum(index.dim(), 0.0);
    for (std::size_t j : index.range_of(i, r_s)) {
      if (normals[j].degenerate) continue;
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += normals[j].nu[k];
    }
    // Sum of unit vectors: the degeneracy scale is 1, not a length.
    out[i] = make_normal_estimate(std::move(sum), 1.0, normals[i].order);
  });
  return out;
}

std::vector<NormalEstimate> normals_from_vectors(const std::vector<std::vector<double>>& unit_normals,
                                                 Order order) {
  std::vector<NormalEstimate> out;
  out.reserve(unit_normals.size());
  for (const auto& nu : unit_normals) out.push_back(make_normal_estimate(nu, 1.0, order));
  return out;
}

double angle_between(std::span<const double> a, std::span<const double> b) {
  const double na = norm(a);
  const double nb = norm(b);
  double diff = 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double u = a[k] / na;
    const double w = b[k] / nb;
    diff += (u - w) * (u - w);
    sum += (u + w) * (u + w);
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

}  // namespace pcb
