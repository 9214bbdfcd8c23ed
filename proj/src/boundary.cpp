#include "pcb/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pcb/error.hpp"
#include "pcb/parallel.hpp"

namespace pcb {
namespace {

double max_projection(const SpatialIndex& index, std::size_t i, double r, std::span<const NormalEstimate> normals,
                      Order order, std::size_t* argmax, bool* empty) {
  const auto& cloud = index.cloud();
  const auto xi = cloud[i];
  const auto& nu_i = normals[i].nu;
  const std::size_t d = cloud.dim();
  const auto nbrs = index.range_of(i, r, false);
  *empty = nbrs.empty();
  if (argmax) *argmax = i;
  if (nbrs.empty()) return r;
  if (normals[i].degenerate) return r;

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j : nbrs) {
    const auto xj = cloud[j];
    const auto& nu_j = normals[j].nu;
    const bool avg = order == Order::second && !normals[j].degenerate && dot(nu_j, nu_i) > 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double dir = avg ? nu_i[k] + 0.5 * (nu_j[k] - nu_i[k]) : nu_i[k];
      s += (xi[k] - xj[k]) * dir;
    }
    if (s > best) {
      best = s;
      if (argmax) *argmax = j;
    }
  }
  return best;
}

}  // namespace

double distance_from_normals(const SpatialIndex& index, std::size_t i, double r,
                             std::span<const NormalEstimate> normals, Order order, std::size_t* argmax) {
  if (!(r > 0.0)) throw Error("distance estimation radius must be positive");
  if (normals.size() != index.size()) throw Error("one normal per point is required");
  bool empty = false;
  const double d = max_projection(index, i, r, normals, order, argmax, &empty);
  if (empty) throw InsufficientNeighbors(i);
  return d;
}

double distance_first_order(const SpatialIndex& index, std::size_t i, double r) {
  if (!(r > 0.0)) throw Error("distance estimation radius must be positive");
  if (index.range_of(i, r, false).empty()) throw InsufficientNeighbors(i);
  const auto est = first_order_normal(index, i, r);
  if (est.degenerate) return r;
  const auto& cloud = index.cloud();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j : index.range_of(i, r, false)) {
    double s = 0.0;
    for (std::size_t k = 0; k < cloud.dim(); ++k) s += (cloud[i][k] - cloud[j][k]) * est.nu[k];
    best = std::max(best, s);
  }
  return best;
}

double distance_second_order(const SpatialIndex& index, std::size_t i, double r) {
  if (!(r > 0.0)) throw Error("distance estimation radius must be positive");
  const auto nbrs = index.range_of(i, r, false);
  if (nbrs.empty()) throw InsufficientNeighbors(i);
  // Only x_i and its neighbours need normals.
  std::vector<NormalEstimate> normals(index.size());
  normals[i] = second_order_normal(index, i, r);
  for (std::size_t j : nbrs) normals[j] = second_order_normal(index, j, r);
  return distance_from_normals(index, i, r, normals, Order::second);
}

DistanceEstimate estimate_distances(const SpatialIndex& index, const Radii& radii, Order order,
                                    NeighborPolicy policy, std::span<const NormalEstimate> normals) {
  std::vector<NormalEstimate> estimated;
  if (normals.empty()) {
    estimated = estimate_normals(index, radii, order);
    normals = estimated;
  } else if (normals.size() != index.size()) {
    throw Error("one normal per point is required");
  }

  const std::size_t n = index.size();
  DistanceEstimate out;
  out.order = order;
  out.d_hat.resize(n);
  out.argmax.resize(n);
  std::vector<std::uint8_t> empty(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const double r = radii[i];
    if (!(r > 0.0)) throw Error("distance estimation radius must be positive");
    bool e = false;
    out.d_hat[i] = max_projection(index, i, r, normals, order, &out.argmax[i], &e);
    empty[i] = e ? 1 : 0;
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (!empty[i]) continue;
    if (policy == NeighborPolicy::raise) throw InsufficientNeighbors(i);
    out.insufficient.push_back(i);
  }
  return out;
}

BoundaryLabel boundary_test(std::span<const double> d_hat, double eps) {
  if (!(eps > 0.0)) throw Error("boundary width eps must be positive");
  BoundaryLabel out;
  out.eps = eps;
  out.threshold = 1.5 * eps;
  out.label.resize(d_hat.size());
  for (std::size_t i = 0; i < d_hat.size(); ++i) out.label[i] = d_hat[i] < out.threshold ? 1 : 0;
  return out;
}

BoundaryLabel boundary_percentile(std::span<const double> d_hat, double percent) {
  if (!(percent > 0.0 && percent <= 100.0)) throw Error("percentile must lie in (0, 100]");
  const std::size_t n = d_hat.size();
  if (n == 0) throw Error("no distance estimates to threshold");
  const double want = percent * static_cast<double>(n) / 100.0;
  // Guard against products like 10 * 2000 / 100 landing a hair above an integer.
  std::size_t m = static_cast<std::size_t>(std::ceil(want - 1e-9 * want));
  m = std::clamp<std::size_t>(m, 1, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d_hat[a] < d_hat[b]; });

  BoundaryLabel out;
  out.label.assign(n, 0);
  for (std::size_t p = 0; p < m; ++p) out.label[order[p]] = 1;
  out.threshold = d_hat[order[m - 1]];
  out.eps = 2.0 * out.threshold / 3.0;
  return out;
}

TheoryConstants theory_constants(std::size_t d, double reach, double lipschitz, double rho_min, double rho_max,
                                 double prob_exponent) {
  if (d == 0) throw Error("dimension must be positive");
  if (!(reach > 0.0)) throw Error("theory constants need a positive reach; assumptions violated");
  if (!(prob_exponent > 2.0)) throw Error("probability exponent gamma must exceed 2");
  if (!(rho_min > 0.0) || !(rho_max >= rho_min)) throw Error("need 0 < rho_min <= rho_max");
  if (!(lipschitz >= 0.0)) throw Error("Lipschitz constant must be nonnegative");

  const double dd = static_cast<double>(d);
  const double w = unit_ball_volume(d);
  const double w1 = unit_ball_volume(d - 1);
  const double R = reach;
  TheoryConstants c;
  c.dim = d;
  c.reach = R;
  c.prob_exponent = prob_exponent;
  c.C_x = 2.0 * w1 + lipschitz * R * w / rho_min;
  c.C_y = w1 / (2.0 * (dd + 1.0));
  const double t1 = std::pow(3.0 * prob_exponent * rho_max * dd * dd * w * R * R / (c.C_x * c.C_x * rho_min * rho_min),
                             1.0 / (dd + 2.0));
  const double t2 = std::pow(2.0 * prob_exponent * (7.0 * c.C_x / (R * c.C_y) + 1.0 / R) / (rho_min * w1),
                             1.0 / (dd + 1.0));
  c.C_r = std::max(t1, t2) / R;
  c.C_eps = (28.0 * c.C_x / c.C_y + 4.0) * c.C_r * c.C_r;
  return c;
}

TheoryConstants theory_constants(const Domain& domain, const Density& density, double prob_exponent) {
  return theory_constants(domain.dim(), domain.reach(), density.lipschitz(), density.rho_min(domain),
                          density.rho_max(domain), prob_exponent);
}

double c_y_full(std::size_t d, double dist, double r, double reach) {
  const double dd = static_cast<double>(d);
  const double t = dist / r - r / reach;
  const double base = std::max(0.0, 1.0 - t * t);
  return unit_ball_volume(d - 1) * std::pow(base, 0.5 * (dd + 1.0)) / (dd + 1.0);
}

std::string to_string(Flag f) {
  switch (f) {
    case Flag::yes:
      return "yes";
    case Flag::no:
      return "no";
    default:
      return "unknown";
  }
}

TestParams assess_params(std::size_t d, double r, double eps, std::optional<double> reach) {
  TestParams p;
  p.r = r;
  p.eps = eps;
  if (!reach || !(*reach > 0.0)) return p;
  p.a1 = eps / r <= 1.0 / (3.0 * std::sqrt(static_cast<double>(d))) ? Flag::yes : Flag::no;
  p.a2 = r * r <= *reach * eps ? Flag::yes : Flag::no;
  return p;
}

TestParams recommended_params(const TheoryConstants& c, std::size_t n, double reach) {
  if (n < 2) throw Error("recommended parameters need n >= 2");
  if (!(reach > 0.0)) throw Error("recommended parameters need a positive reach");
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(c.dim);
  const double base = std::log(nn) / nn;
  const double eps = reach * c.C_eps * std::pow(base, 2.0 / (dd + 2.0));
  const double r = reach * c.C_r * std::pow(base, 1.0 / (dd + 2.0));
  return assess_params(c.dim, r, eps, reach);
}

double default_radius(const SpatialIndex& index, std::size_t k0) {
  if (k0 == 0 || k0 >= index.size()) {
    throw Error("insufficient points: need more than k0 = " + std::to_string(k0) + " points");
  }
  std::vector<double> kth(index.size());
  parallel_for(index.size(), [&](std::size_t i) { kth[i] = index.kth_neighbor_distance(i, k0); });
  return *std::max_element(kth.begin(), kth.end());
}

DetectionMetrics detection_metrics(std::span<const std::uint8_t> labels, std::span<const double> true_dist, double eps,
                                   std::span<const std::uint8_t> mask) {
  if (labels.size() != true_dist.size()) throw Error("labels and true distances differ in length");
  if (!mask.empty() && mask.size() != labels.size()) throw Error("mask length differs from labels");
  DetectionMetrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    const bool pos = labels[i] != 0;
    const double d = true_dist[i];
    (pos ? m.P : m.N) += 1;
    if (d <= eps) {
      ++m.BP;
      if (!pos) ++m.FN;
    } else if (d > 2.0 * eps && pos) {
      ++m.FP;
    }
  }
  if (m.BP == 0) throw Error("no true boundary points: detection metrics undefined");
  m.FNR = static_cast<double>(m.FN) / static_cast<double>(m.BP);
  m.FPR = static_cast<double>(m.FP) / static_cast<double>(m.BP);
  m.TFR = m.FNR + m.FPR;
  return m;
}

}  // namespace pcb
