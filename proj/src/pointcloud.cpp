#include "pcb/pointcloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pcb/error.hpp"
#include "pcb/random.hpp"

namespace pcb {

PointCloud::PointCloud(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
  if (dim_ == 0) throw Error("point cloud dimension must be positive");
  if (coords_.empty()) throw Error("point cloud must contain at least one point");
  if (coords_.size() % dim_ != 0) throw Error("coordinate count is not a multiple of the dimension");
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    if (!std::isfinite(coords_[k])) {
      throw Error("non-finite coordinate in point " + std::to_string(k / dim_));
    }
  }
}

PointCloud PointCloud::permuted(std::span<const std::size_t> order) const {
  std::vector<double> out;
  out.reserve(order.size() * dim_);
  for (std::size_t i : order) {
    const auto row = (*this)[i];
    out.insert(out.end(), row.begin(), row.end());
  }
  return PointCloud(dim_, std::move(out));
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm(std::span<const double> v) noexcept { return std::sqrt(dot(v, v)); }

double unit_ball_volume(std::size_t d) {
  const double h = 0.5 * static_cast<double>(d);
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

// ---------------------------------------------------------------------------

Domain Domain::ball(std::size_t dim, double radius) {
  if (dim == 0 || !(radius > 0.0)) throw Error("ball needs dim >= 1 and radius > 0");
  return Domain(dim, Ball{radius});
}

Domain Domain::annulus(std::size_t dim, double inner, double outer, AnnulusBoundary boundary) {
  if (dim == 0 || !(inner > 0.0) || !(outer > inner)) {
    throw Error("annulus needs dim >= 1 and 0 < inner < outer");
  }
  return Domain(dim, Annulus{inner, outer, boundary});
}

Domain Domain::box(std::vector<double> sides) {
  if (sides.empty()) throw Error("box needs at least one side length");
  for (double s : sides) {
    if (!(s > 0.0)) throw Error("box side lengths must be positive");
  }
  const std::size_t dim = sides.size();
  return Domain(dim, Box{std::move(sides)});
}

double Domain::reach() const {
  if (const auto* b = std::get_if<Ball>(&shape_)) return b->radius;
  if (const auto* a = std::get_if<Annulus>(&shape_)) {
    if (a->boundary == AnnulusBoundary::inner) return a->inner;
    return std::min(a->inner, 0.5 * (a->outer - a->inner));
  }
  return 0.0;
}

double Domain::volume() const {
  const double w = unit_ball_volume(dim_);
  const double d = static_cast<double>(dim_);
  if (const auto* b = std::get_if<Ball>(&shape_)) return w * std::pow(b->radius, d);
  if (const auto* a = std::get_if<Annulus>(&shape_)) return w * (std::pow(a->outer, d) - std::pow(a->inner, d));
  double v = 1.0;
  for (double s : std::get<Box>(shape_).sides) v *= s;
  return v;
}

bool Domain::contains(std::span<const double> x) const {
  if (const auto* b = std::get_if<Ball>(&shape_)) return dot(x, x) <= b->radius * b->radius;
  if (const auto* a = std::get_if<Annulus>(&shape_)) {
    const double s = dot(x, x);
    return s >= a->inner * a->inner && s <= a->outer * a->outer;
  }
  const auto& sides = std::get<Box>(shape_).sides;
  for (std::size_t k = 0; k < dim_; ++k) {
    if (x[k] < 0.0 || x[k] > sides[k]) return false;
  }
  return true;
}

std::pair<std::vector<double>, std::vector<double>> Domain::bounding_box() const {
  if (const auto* bx = std::get_if<Box>(&shape_)) return {std::vector<double>(dim_, 0.0), bx->sides};
  const double R = std::holds_alternative<Ball>(shape_) ? std::get<Ball>(shape_).radius
                                                         : std::get<Annulus>(shape_).outer;
  return {std::vector<double>(dim_, -R), std::vector<double>(dim_, R)};
}

std::string Domain::describe() const {
  std::ostringstream os;
  if (const auto* b = std::get_if<Ball>(&shape_)) {
    os << "ball(d=" << dim_ << ",R=" << format_double(b->radius) << ")";
  } else if (const auto* a = std::get_if<Annulus>(&shape_)) {
    os << "annulus(d=" << dim_ << ",R1=" << format_double(a->inner) << ",R2=" << format_double(a->outer)
       << "," << (a->boundary == AnnulusBoundary::inner ? "inner" : "both") << ")";
  } else {
    os << "box(";
    const auto& sides = std::get<Box>(shape_).sides;
    for (std::size_t k = 0; k < sides.size(); ++k) os << (k ? "x" : "") << format_double(sides[k]);
    os << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

double Density::operator()(const Domain& domain, std::span<const double> x) const {
  const double vol = domain.volume();
  if (kind_ == Kind::uniform) return 1.0 / vol;
  return (1.0 + 0.5 * std::sin(lipschitz_ * vol * x[0])) / vol;
}

double Density::rho_min(const Domain& domain) const {
  const double vol = domain.volume();
  if (kind_ == Kind::uniform || lipschitz_ == 0.0) return 1.0 / vol;
  return 0.5 / vol;
}

double Density::rho_max(const Domain& domain) const {
  const double vol = domain.volume();
  if (kind_ == Kind::uniform || lipschitz_ == 0.0) return 1.0 / vol;
  return 1.5 / vol;
}

std::string Density::describe() const {
  if (kind_ == Kind::uniform) return "uniform";
  return "sinusoidal(L=" + format_double(lipschitz_) + ")";
}

// ---------------------------------------------------------------------------

PointCloud sample(const Domain& domain, const Density& density, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error("sample size must be at least 1");
  const std::size_t d = domain.dim();
  const auto [lo, hi] = domain.bounding_box();
  const double envelope = density.rho_max(domain);
  Rng rng(seed);

  std::vector<double> coords;
  coords.reserve(n * d);
  std::vector<double> x(d);
  std::size_t accepted = 0;
  std::uint64_t proposed = 0;
  constexpr std::uint64_t kWarmup = 1'000'000;
  while (accepted < n) {
    for (std::size_t k = 0; k < d; ++k) x[k] = lo[k] + (hi[k] - lo[k]) * rng.uniform();
    const double u = rng.uniform();
    ++proposed;
    if (domain.contains(x) && u * envelope < density(domain, x)) {
      coords.insert(coords.end(), x.begin(), x.end());
      ++accepted;
    } else if (proposed >= kWarmup && static_cast<double>(accepted) < 1e-6 * static_cast<double>(proposed)) {
      throw Error("degenerate density: rejection acceptance rate below 1e-6");
    }
  }
  return PointCloud(d, std::move(coords));
}

// ---------------------------------------------------------------------------

double GroundTruth::distance(std::span<const double> x) const {
  const auto& shape = domain_.shape();
  if (const auto* b = std::get_if<Ball>(&shape)) return std::max(0.0, b->radius - norm(x));
  if (const auto* a = std::get_if<Annulus>(&shape)) {
    const double r = norm(x);
    const double to_inner = std::max(0.0, r - a->inner);
    if (a->boundary == AnnulusBoundary::inner) return to_inner;
    return std::min(to_inner, std::max(0.0, a->outer - r));
  }
  const auto& sides = std::get<Box>(shape).sides;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sides.size(); ++k) {
    best = std::min({best, x[k], sides[k] - x[k]});
  }
  return std::max(0.0, best);
}

std::vector<double> GroundTruth::normal(std::span<const double> x) const {
  const auto& shape = domain_.shape();
  const std::size_t d = domain_.dim();
  std::vector<double> nu(d, 0.0);
  if (const auto* bx = std::get_if<Box>(&shape)) {
    // Nearest face must be unique; ties are the medial axis.
    double best = std::numeric_limits<double>::infinity();
    std::size_t face = 0;
    bool tie = false;
    for (std::size_t k = 0; k < d; ++k) {
      for (int side = 0; side < 2; ++side) {
        const double dist = side == 0 ? x[k] : bx->sides[k] - x[k];
        if (dist < best) {
          best = dist;
          face = 2 * k + static_cast<std::size_t>(side);
          tie = false;
        } else if (dist == best) {
          tie = true;
        }
      }
    }
    if (tie) throw Error("normal undefined: point lies on the medial axis");
    nu[face / 2] = face % 2 == 0 ? 1.0 : -1.0;
    return nu;
  }
  if (distance(x) >= domain_.reach()) throw Error("normal undefined: point lies on or beyond the reach");
  const double r = norm(x);
  double sign = -1.0;  // ball and outer sphere: toward the centre
  if (const auto* a = std::get_if<Annulus>(&shape)) {
    sign = (a->boundary == AnnulusBoundary::inner || r - a->inner <= a->outer - r) ? 1.0 : -1.0;
  }
  for (std::size_t k = 0; k < d; ++k) nu[k] = sign * x[k] / r;
  return nu;
}

std::vector<double> GroundTruth::distances(const PointCloud& cloud) const {
  std::vector<double> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) out[i] = distance(cloud[i]);
  return out;
}

}  // namespace pcb
