#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pcb {

/// n points in R^d stored row-major. Row order is the point index used by
/// every downstream result. Immutable after construction.
class PointCloud {
 public:
  /// Throws pcb::Error unless dim >= 1, coords.size() is a positive multiple
  /// of dim and every coordinate is finite.
  PointCloud(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return coords_.size() / dim_; }
  std::span<const double> operator[](std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const noexcept { return coords_; }

  /// Cloud whose row k is row `order[k]` of this one.
  PointCloud permuted(std::span<const std::size_t> order) const;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
double distance(std::span<const double> a, std::span<const double> b) noexcept;
double norm(std::span<const double> v) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;

/// Volume of the unit ball in R^d.
double unit_ball_volume(std::size_t d);

// ---------------------------------------------------------------------------
// Domains

struct Ball {
  double radius;
};

enum class AnnulusBoundary { inner, both };

struct Annulus {
  double inner;
  double outer;
  AnnulusBoundary boundary = AnnulusBoundary::inner;
};

/// Axis-aligned box [0, sides[0]] x ... x [0, sides[d-1]].
struct Box {
  std::vector<double> sides;
};

/// A sampling domain centred at the origin (balls, annuli) or anchored at the
/// origin (boxes).
class Domain {
 public:
  static Domain ball(std::size_t dim, double radius);
  static Domain annulus(std::size_t dim, double inner, double outer,
                        AnnulusBoundary boundary = AnnulusBoundary::inner);
  static Domain box(std::vector<double> sides);

  std::size_t dim() const noexcept { return dim_; }
  const std::variant<Ball, Annulus, Box>& shape() const noexcept { return shape_; }
  bool is_box() const noexcept { return std::holds_alternative<Box>(shape_); }

  /// Reach of the boundary that distances are measured to. Boxes report 0.
  double reach() const;
  double volume() const;
  bool contains(std::span<const double> x) const;
  /// Lower and upper corners of the axis-aligned bounding box.
  std::pair<std::vector<double>, std::vector<double>> bounding_box() const;
  std::string describe() const;

 private:
  Domain(std::size_t dim, std::variant<Ball, Annulus, Box> shape) : dim_(dim), shape_(std::move(shape)) {}
  std::size_t dim_;
  std::variant<Ball, Annulus, Box> shape_;
};

/// Sampling density restricted to a domain. Sinusoidal(L) is
/// rho(x) = (1 + sin(L |Omega| x_1) / 2) / |Omega|, whose x_1-derivative is
/// bounded by L.
class Density {
 public:
  enum class Kind { uniform, sinusoidal };

  static Density uniform() { return Density(Kind::uniform, 0.0); }
  static Density sinusoidal(double lipschitz) { return Density(Kind::sinusoidal, lipschitz); }

  Kind kind() const noexcept { return kind_; }
  double lipschitz() const noexcept { return kind_ == Kind::uniform ? 0.0 : lipschitz_; }
  double operator()(const Domain& domain, std::span<const double> x) const;
  double rho_min(const Domain& domain) const;
  double rho_max(const Domain& domain) const;
  std::string describe() const;

 private:
  Density(Kind kind, double lipschitz) : kind_(kind), lipschitz_(lipschitz) {}
  Kind kind_;
  double lipschitz_;
};

/// n i.i.d. draws from `density` on `domain` by rejection from the bounding
/// box with constant envelope rho_max. Deterministic in `seed`, and the first
/// m points of a sample of size n > m equal the sample of size m.
/// Throws pcb::Error("degenerate density") if the acceptance rate drops below 1e-6.
PointCloud sample(const Domain& domain, const Density& density, std::size_t n, std::uint64_t seed);

/// Exact distance to the boundary and inward unit normal for a synthetic domain.
/// For an annulus with AnnulusBoundary::inner only the sphere |x| = inner counts.
class GroundTruth {
 public:
  explicit GroundTruth(Domain domain) : domain_(std::move(domain)) {}

  const Domain& domain() const noexcept { return domain_; }
  double distance(std::span<const double> x) const;
  /// Throws pcb::Error("normal undefined") on the medial axis.
  std::vector<double> normal(std::span<const double> x) const;

  std::vector<double> distances(const PointCloud& cloud) const;

 private:
  Domain domain_;
};

inline GroundTruth ground_truth(const Domain& domain) { return GroundTruth(domain); }

// ---------------------------------------------------------------------------
// File formats

/// One point per line, comma separated, '.' decimal separator. An optional
/// header line is recognised by a non-numeric first token; lines starting with
/// '#' are comments.
PointCloud load_csv(const std::filesystem::path& path);
PointCloud parse_csv(const std::string& text);
void save_csv(const PointCloud& cloud, const std::filesystem::path& path, const std::string& comment = {});
std::string format_csv(const PointCloud& cloud);

/// "PCB1" magic, u32 dim, u64 n, then n*dim float64 row-major, all little endian.
PointCloud load_binary(const std::filesystem::path& path);
PointCloud parse_binary(std::span<const std::uint8_t> bytes);
void save_binary(const PointCloud& cloud, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_binary(const PointCloud& cloud);

/// Dispatches on extension: ".pcb"/".bin" binary, anything else CSV.
PointCloud load_points(const std::filesystem::path& path);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

}  // namespace pcb
