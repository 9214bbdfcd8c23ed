#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "pcb/error.hpp"
#include "pcb/pointcloud.hpp"

using namespace pcb;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pcb_test_" + name);
}

}  // namespace

TEST_SUITE("pointcloud") {
  TEST_CASE("constructor validates shape and finiteness") {
    CHECK_THROWS_AS(PointCloud(0, {1.0}), Error);
    CHECK_THROWS_AS(PointCloud(2, {}), Error);
    CHECK_THROWS_AS(PointCloud(2, {1.0, 2.0, 3.0}), Error);
    CHECK_THROWS_AS(PointCloud(1, {NAN}), Error);
    const PointCloud c(2, {1.0, 2.0, 3.0, 4.0});
    CHECK(c.size() == 2);
    CHECK(c[1][0] == 3.0);
  }

  TEST_CASE("unit ball sample stays inside") {
    const PointCloud c = sample(Domain::ball(2, 1.0), Density::uniform(), 4, 7);
    REQUIRE(c.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(norm(c[i]) <= 1.0);
  }

  TEST_CASE("box sample mean is near the centre") {
    // Uniform on [0,1]: sigma = 1/sqrt(12); 3 sigma / sqrt(n) = 0.0087 < 0.02.
    const PointCloud c = sample(Domain::box({1.0, 1.0}), Density::sinusoidal(0.0), 10000, 1);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      m0 += c[i][0];
      m1 += c[i][1];
    }
    CHECK(std::abs(m0 / 1e4 - 0.5) < 0.02);
    CHECK(std::abs(m1 / 1e4 - 0.5) < 0.02);
  }

  TEST_CASE("annulus sample matches the area ratio") {
    const PointCloud c = sample(Domain::annulus(2, 0.5, 0.8), Density::uniform(), 100000, 2);
    std::size_t inner = 0;
    for (std::size_t i = 0; i < c.size(); ++i) inner += norm(c[i]) < 0.65 ? 1 : 0;
    const double expected = (0.65 * 0.65 - 0.25) / (0.64 - 0.25);
    CHECK(std::abs(static_cast<double>(inner) / 1e5 - expected) < 0.01);
  }

  TEST_CASE("sampler is deterministic and prefix stable") {
    const Domain d = Domain::ball(3, 0.5);
    const auto a = sample(d, Density::sinusoidal(2.0), 300, 11);
    const auto b = sample(d, Density::sinusoidal(2.0), 300, 11);
    const auto c = sample(d, Density::sinusoidal(2.0), 100, 11);
    CHECK(a.coords() == b.coords());
    CHECK(std::equal(c.coords().begin(), c.coords().end(), a.coords().begin()));
    const auto other = sample(d, Density::sinusoidal(2.0), 300, 12);
    CHECK(a.coords() != other.coords());
  }

  TEST_CASE("sinusoidal density stays within its bounds") {
    const Domain d = Domain::ball(2, 0.5);
    const Density rho = Density::sinusoidal(2.0);
    const double vol = d.volume();
    CHECK(rho.rho_min(d) == doctest::Approx(0.5 / vol));
    CHECK(rho.rho_max(d) == doctest::Approx(1.5 / vol));
    const auto c = sample(d, rho, 2000, 3);
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double v = rho(d, c[i]);
      CHECK(v >= rho.rho_min(d) - 1e-15);
      CHECK(v <= rho.rho_max(d) + 1e-15);
    }
    const std::vector<double> x{0.1, 0.2};
    CHECK(rho(d, x) == doctest::Approx((1.0 + 0.5 * std::sin(2.0 * vol * 0.1)) / vol));
  }

  TEST_CASE("domain reach and volume") {
    CHECK(Domain::ball(2, 0.5).reach() == 0.5);
    CHECK(Domain::annulus(2, 0.5, 0.8).reach() == 0.5);
    CHECK(Domain::box({1.0, 2.0}).reach() == 0.0);
    CHECK(Domain::ball(3, 1.0).volume() == doctest::Approx(4.0 * std::numbers::pi / 3.0));
    CHECK(Domain::box({1.0, 2.0}).volume() == doctest::Approx(2.0));
    CHECK_THROWS_AS(Domain::annulus(2, 0.8, 0.5), Error);
  }

  TEST_CASE("ground truth distances and normals") {
    const GroundTruth ball(Domain::ball(3, 0.5));
    const std::vector<double> x{0.3, 0.0, 0.0};
    CHECK(ball.distance(x) == doctest::Approx(0.2));
    const auto nu = ball.normal(x);
    CHECK(nu[0] == doctest::Approx(-1.0));
    CHECK(nu[1] == doctest::Approx(0.0));

    const GroundTruth ann(Domain::annulus(2, 0.5, 0.8));
    const std::vector<double> y{0.6, 0.0};
    CHECK(ann.distance(y) == doctest::Approx(0.1));
    const auto ny = ann.normal(y);
    CHECK(ny[0] == doctest::Approx(1.0));

    const GroundTruth box(Domain::box({1.0, 1.0}));
    const std::vector<double> z{0.2, 0.7};
    CHECK(box.distance(z) == doctest::Approx(0.2));

    const std::vector<double> origin{0.0, 0.0, 0.0};
    CHECK_THROWS_WITH_AS(ball.normal(origin), doctest::Contains("normal undefined"), Error);
  }

  TEST_CASE("ball normal agrees with a finite-difference gradient of the distance") {
    const Domain d = Domain::ball(2, 0.5);
    const GroundTruth gt(d);
    const auto c = sample(d, Density::uniform(), 200, 5);
    const double h = 1e-6;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (gt.distance(c[i]) >= 0.45) continue;
      const auto nu = gt.normal(c[i]);
      CHECK(norm(nu) == doctest::Approx(1.0).epsilon(1e-12));
      for (std::size_t k = 0; k < 2; ++k) {
        std::vector<double> p(c[i].begin(), c[i].end()), m(p);
        p[k] += h;
        m[k] -= h;
        const double grad = (gt.distance(p) - gt.distance(m)) / (2.0 * h);
        CHECK(std::abs(grad - nu[k]) < 1e-4);
      }
    }
  }

  TEST_CASE("annulus inner distance is |x| - R1 for samples") {
    const Domain d = Domain::annulus(2, 0.5, 0.8);
    const GroundTruth gt(d);
    const auto c = sample(d, Density::uniform(), 500, 9);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(gt.distance(c[i]) == doctest::Approx(norm(c[i]) - 0.5));
  }

  TEST_CASE("csv parsing") {
    const auto c = parse_csv("0.0,0.0\n1.0,0.0");
    CHECK(c.dim() == 2);
    CHECK(c.size() == 2);
    const auto h = parse_csv("# comment\nx,y\n1,2\n3,4\n");
    CHECK(h.size() == 2);
    CHECK(h[1][1] == 4.0);
    CHECK_THROWS_WITH_AS(parse_csv("1.0,x"), doctest::Contains("line 1"), ParseError);
    CHECK_THROWS_AS(parse_csv("1,2\n3"), ParseError);
    CHECK_THROWS_AS(parse_csv(""), ParseError);
  }

  TEST_CASE("csv round trip is bit exact") {
    const auto c = sample(Domain::ball(2, 0.5), Density::uniform(), 1000, 4);
    const auto path = temp_file("roundtrip.csv");
    save_csv(c, path, "seed 4");
    const auto back = load_csv(path);
    CHECK(back.coords() == c.coords());
    std::filesystem::remove(path);
  }

  TEST_CASE("binary format") {
    std::vector<std::uint8_t> bytes{'P', 'C', 'B', '1', 2, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0};
    bytes.resize(bytes.size() + 16, 0);
    const auto c = parse_binary(bytes);
    CHECK(c.dim() == 2);
    CHECK(c.size() == 1);
    CHECK(c[0][0] == 0.0);

    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_WITH_AS(parse_binary(truncated), doctest::Contains("truncated"), ParseError);
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_WITH_AS(parse_binary(bad), doctest::Contains("magic"), ParseError);

    const auto big = sample(Domain::box({1.0, 1.0, 1.0}), Density::uniform(), 100000, 6);
    const auto path = temp_file("roundtrip.pcb");
    save_binary(big, path);
    const auto back = load_points(path);
    CHECK(back.coords() == big.coords());
    CHECK(encode_binary(back) == encode_binary(big));
    std::filesystem::remove(path);
  }

  TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) CHECK(std::stod(format_double(v)) == v);
  }
}
