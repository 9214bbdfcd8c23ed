#include "pcb/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pcb/error.hpp"
#include "pcb/random.hpp"

namespace pcb {
namespace {

// Upper bound on quadrature nodes per evaluation; finer grids are not attempted.
constexpr double kNodeBudget = 4e7;

double direction_change(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = norm(a), nb = norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) return na == nb ? 0.0 : std::numbers::pi;
  std::vector<double> diff(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) diff[k] = a[k] / na - b[k] / nb;
  return 2.0 * std::asin(std::min(1.0, norm(diff) / 2.0));
}

bool within_budget(std::size_t cells, std::size_t dim) {
  return std::pow(static_cast<double>(cells), static_cast<double>(dim)) <= kNodeBudget;
}

}  // namespace

PopulationOracle::PopulationOracle(Domain domain, const Density& density, double tolerance, std::size_t min_cells,
                                   std::size_t max_cells)
    : PopulationOracle(domain, DensityFn([domain, density](std::span<const double> x) { return density(domain, x); }),
                       tolerance, min_cells, max_cells) {}

PopulationOracle::PopulationOracle(Domain domain, DensityFn density, double tolerance, std::size_t min_cells,
                                   std::size_t max_cells)
    : domain_(std::move(domain)),
      density_(std::move(density)),
      tolerance_(tolerance),
      min_cells_(std::max<std::size_t>(min_cells, 2)),
      max_cells_(std::max(max_cells, min_cells)) {
  if (!density_) throw Error("population oracle needs a density");
  if (!(tolerance_ > 0.0)) throw Error("population oracle tolerance must be positive");
}

std::vector<std::vector<double>> PopulationOracle::frame(std::span<const double> x0) const {
  const std::size_t d = domain_.dim();
  std::vector<std::vector<double>> axes;
  const double r0 = norm(x0);
  if (!domain_.is_box() && r0 > 0.0) {
    std::vector<double> e(x0.begin(), x0.end());
    for (double& v : e) v /= r0;
    axes.push_back(std::move(e));
  }
  // Gram-Schmidt completion with the standard basis.
  for (std::size_t k = 0; k < d && axes.size() < d; ++k) {
    std::vector<double> e(d, 0.0);
    e[k] = 1.0;
    for (const auto& a : axes) {
      const double p = dot(e, a);
      for (std::size_t m = 0; m < d; ++m) e[m] -= p * a[m];
    }
    const double ne = norm(e);
    if (ne < 1e-8) continue;
    for (double& v : e) v /= ne;
    axes.push_back(std::move(e));
  }
  return axes;
}

template <typename Weight>
std::vector<double> PopulationOracle::integrate(std::span<const double> x0, double r, std::size_t cells,
                                                Weight&& weight) const {
  const std::size_t d = domain_.dim();
  const auto axes = frame(x0);
  const double h = 2.0 * r / static_cast<double>(cells);
  const double r2 = r * r;
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> c(d), y(d), z(d);
  std::vector<double> acc;
  while (true) {
    double c2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      c[k] = -r + (static_cast<double>(idx[k]) + 0.5) * h;
      c2 += c[k] * c[k];
    }
    if (c2 <= r2) {
      for (std::size_t m = 0; m < d; ++m) {
        z[m] = 0.0;
        for (std::size_t k = 0; k < d; ++k) z[m] += c[k] * axes[k][m];
        y[m] = x0[m] + z[m];
      }
      if (domain_.contains(y)) weight(std::span<const double>(y), std::span<const double>(z), acc);
    }
    std::size_t k = 0;
    while (k < d && ++idx[k] == cells) idx[k++] = 0;
    if (k == d) break;
  }
  const double vol = std::pow(h, static_cast<double>(d));
  for (double& v : acc) v *= vol;
  return acc;
}

PopulationOracle::Result PopulationOracle::v_bar(std::span<const double> x0, double r) const {
  if (!(r > 0.0)) throw Error("population oracle radius must be positive");
  const std::size_t d = domain_.dim();
  auto eval = [&](std::size_t cells) {
    auto v = integrate(x0, r, cells, [&](std::span<const double> y, std::span<const double> z, std::vector<double>& acc) {
      if (acc.empty()) acc.assign(d, 0.0);
      const double w = density_(y);
      for (std::size_t m = 0; m < d; ++m) acc[m] += w * z[m];
    });
    if (v.empty()) v.assign(d, 0.0);
    return v;
  };
  Result res;
  res.cells = min_cells_;
  res.value = eval(res.cells);
  while (res.cells * 2 <= max_cells_ && within_budget(res.cells * 2, d)) {
    auto next = eval(res.cells * 2);
    res.change = direction_change(res.value, next);
    res.value = std::move(next);
    res.cells *= 2;
    if (res.change < tolerance_) {
      res.converged = true;
      break;
    }
  }
  return res;
}

double PopulationOracle::theta(std::span<const double> x, double r, std::size_t cells) const {
  if (!(r > 0.0)) throw Error("population oracle radius must be positive");
  const std::size_t d = domain_.dim();
  const auto mass = integrate(x, r / 2.0, cells, [&](std::span<const double> y, std::span<const double>, std::vector<double>& acc) {
    if (acc.empty()) acc.assign(1, 0.0);
    acc[0] += density_(y);
  });
  const double m = mass.empty() ? 0.0 : mass[0];
  return std::pow(2.0 / r, static_cast<double>(d)) * m / unit_ball_volume(d);
}

PopulationOracle::Result PopulationOracle::v_bar_n(std::span<const double> x0, double r, std::size_t theta_cells) const {
  if (!(r > 0.0)) throw Error("population oracle radius must be positive");
  const std::size_t d = domain_.dim();
  auto eval = [&](std::size_t cells) {
    auto v = integrate(x0, r, cells, [&](std::span<const double> y, std::span<const double> z, std::vector<double>& acc) {
      if (acc.empty()) acc.assign(d, 0.0);
      const double th = theta(y, r, theta_cells);
      if (!(th > 0.0)) return;
      const double w = density_(y) / th;
      for (std::size_t m = 0; m < d; ++m) acc[m] += w * z[m];
    });
    if (v.empty()) v.assign(d, 0.0);
    return v;
  };
  Result res;
  res.cells = min_cells_;
  res.value = eval(res.cells);
  const double budget = kNodeBudget / std::pow(static_cast<double>(theta_cells), static_cast<double>(d));
  while (res.cells * 2 <= max_cells_ &&
         std::pow(static_cast<double>(res.cells * 2), static_cast<double>(d)) <= budget) {
    auto next = eval(res.cells * 2);
    res.change = direction_change(res.value, next);
    res.value = std::move(next);
    res.cells *= 2;
    if (res.change < tolerance_) {
      res.converged = true;
      break;
    }
  }
  return res;
}

double PopulationOracle::max_projection(std::span<const double> x0, double r, std::span<const double> nu) const {
  const std::size_t d = domain_.dim();
  std::vector<double> radii;
  double inner = 0.0, outer = 0.0;
  if (const auto* b = std::get_if<Ball>(&domain_.shape())) {
    outer = b->radius;
    radii = {outer};
  } else if (const auto* a = std::get_if<Annulus>(&domain_.shape())) {
    inner = a->inner;
    outer = a->outer;
    radii = {inner, outer};
  } else {
    throw Error("exact population distance is available for balls and annuli only");
  }

  constexpr double kSlack = 1e-12;
  auto feasible = [&](const std::vector<double>& x) {
    const double rx = norm(x);
    return distance(x, x0) <= r * (1.0 + kSlack) && rx <= outer * (1.0 + kSlack) && rx >= inner * (1.0 - kSlack);
  };
  double best = -std::numeric_limits<double>::infinity();
  auto consider = [&](const std::vector<double>& x) {
    if (!feasible(x)) return;
    double p = 0.0;
    for (std::size_t m = 0; m < d; ++m) p += (x0[m] - x[m]) * nu[m];
    best = std::max(best, p);
  };

  // Extreme points of a linear function over B(x0, r) cap Omega lie on one
  // bounding sphere or on the intersection of two of them.
  std::vector<double> x(d);
  for (std::size_t m = 0; m < d; ++m) x[m] = x0[m] - r * nu[m];
  consider(x);
  for (double rk : radii) {
    for (double s : {-1.0, 1.0}) {
      for (std::size_t m = 0; m < d; ++m) x[m] = s * rk * nu[m];
      consider(x);
    }
  }
  const double r0 = norm(x0);
  if (r0 > 0.0) {
    std::vector<double> e(d), perp(d);
    for (std::size_t m = 0; m < d; ++m) e[m] = x0[m] / r0;
    const double ne = dot(nu, e);
    for (std::size_t m = 0; m < d; ++m) perp[m] = nu[m] - ne * e[m];
    double np = norm(perp);
    if (np < 1e-15) {
      // Any unit vector orthogonal to e.
      std::fill(perp.begin(), perp.end(), 0.0);
      const std::size_t k = std::abs(e[0]) < 0.9 ? 0 : 1;
      if (k < d) perp[k] = 1.0;
      const double p = dot(perp, e);
      for (std::size_t m = 0; m < d; ++m) perp[m] -= p * e[m];
      np = norm(perp);
    }
    if (np > 0.0) {
      for (double rk : radii) {
        const double h = (rk * rk - r * r + r0 * r0) / (2.0 * r0);
        const double s2 = rk * rk - h * h;
        if (s2 < 0.0) continue;
        const double rs = std::sqrt(s2);
        for (double s : {-1.0, 1.0}) {
          for (std::size_t m = 0; m < d; ++m) x[m] = h * e[m] + s * rs * perp[m] / np;
          consider(x);
        }
      }
    }
  }
  if (!std::isfinite(best)) throw Error("B(x0, r) does not meet the domain");
  return best;
}

double PopulationOracle::d_bar(std::span<const double> x0, double r) const {
  const auto v = v_bar(x0, r).value;
  const double nv = norm(v);
  if (!(nv > 0.0)) return r;
  std::vector<double> nu(v);
  for (double& c : nu) c /= nv;
  return max_projection(x0, r, nu);
}

double ball_fraction_inside(const Domain& domain, std::span<const double> x0, double r, std::size_t samples,
                            std::uint64_t seed) {
  if (samples == 0) throw Error("ball_fraction_inside needs at least one sample");
  const std::size_t d = domain.dim();
  Rng rng(seed);
  std::vector<double> y(d);
  std::size_t inside = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    double g2 = 0.0;
    for (std::size_t m = 0; m < d; ++m) {
      y[m] = rng.gaussian();
      g2 += y[m] * y[m];
    }
    const double scale = r * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) / std::sqrt(g2);
    for (std::size_t m = 0; m < d; ++m) y[m] = x0[m] + scale * y[m];
    if (domain.contains(y)) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(samples);
}

}  // namespace pcb
