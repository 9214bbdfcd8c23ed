#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "pcb/boundary.hpp"
#include "pcb/error.hpp"
#include "pcb/graph.hpp"
#include "pcb/linear_solver.hpp"
#include "pcb/pde.hpp"
#include "pcb/pointcloud.hpp"
#include "pcb/random.hpp"
#include "pcb/spatial.hpp"

using namespace pcb;

namespace {

/// Pairs within eps as undirected edges with Euclidean lengths.
std::vector<oracle::WeightedEdge> brute_edges(const PointCloud& c, double eps) {
  std::vector<oracle::WeightedEdge> e;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const double d = oracle::dist(c[i], c[j]);
      if (d > 0.0 && d <= eps) e.push_back({i, j, d});
    }
  }
  return e;
}

PointCloud line(std::initializer_list<double> xs) { return PointCloud(1, std::vector<double>(xs)); }

std::vector<NormalEstimate> unit_normals_1d(std::size_t n, const std::vector<std::pair<std::size_t, double>>& set) {
  std::vector<std::vector<double>> v(n, std::vector<double>{1.0});
  for (auto [i, s] : set) v[i] = {s};
  return normals_from_vectors(v, Order::second);
}

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("epsilon graph edges") {
    const auto k = Kernel::indicator(2);
    const SpatialIndex far(PointCloud(2, {0.0, 0.0, 1.0, 0.0}));
    CHECK(build_epsilon_graph(far, 0.5, k).edge_count() == 0);
    const SpatialIndex near(PointCloud(2, {0.0, 0.0, 0.5, 0.0}));
    const Graph g = build_epsilon_graph(near, 0.5, k);
    CHECK(g.edge_count() == 2);
    CHECK(g.weight(0, 1) == doctest::Approx(1.0 / std::numbers::pi));
    CHECK(k.sigma() == doctest::Approx(0.25));
  }

  TEST_CASE("epsilon graph equals a brute-force pairwise check") {
    const auto cloud = sample(Domain::box({1.0, 1.0}), Density::uniform(), 200, 1);
    const SpatialIndex idx(cloud);
    const auto k = Kernel::bump(2);
    const Graph g = build_epsilon_graph(idx, 0.15, k);
    std::size_t count = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      for (std::size_t j = 0; j < cloud.size(); ++j) {
        const double d = oracle::dist(cloud[i], cloud[j]);
        if (i == j || d > 0.15) {
          CHECK(g.weight(i, j) == 0.0);
        } else {
          ++count;
          CHECK(g.weight(i, j) == doctest::Approx(k(d / 0.15)));
        }
      }
    }
    CHECK(g.edge_count() == count);
    CHECK(g.is_symmetric());
  }

  TEST_CASE("kernel normalization") {
    for (std::size_t d : {1u, 2u, 3u}) {
      for (const Kernel& k : {Kernel::indicator(d), Kernel::bump(d)}) {
        // integral of eta(|z|) over R^d = d omega_d integral_0^1 eta(t) t^{d-1} dt
        const int m = 200000;
        double mass = 0.0, second = 0.0;
        for (int i = 0; i < m; ++i) {
          const double t = (i + 0.5) / m;
          mass += k(t) * std::pow(t, static_cast<double>(d) - 1.0) / m;
          second += k(t) * std::pow(t, static_cast<double>(d) + 1.0) / m;
        }
        const double surface = static_cast<double>(d) * unit_ball_volume(d);
        CHECK(surface * mass == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(surface * second / static_cast<double>(d) == doctest::Approx(k.sigma()).epsilon(1e-6));
      }
      CHECK(Kernel::indicator(d).sigma() == doctest::Approx(1.0 / (static_cast<double>(d) + 2.0)));
    }
  }

  TEST_CASE("knn gaussian weights") {
    const SpatialIndex idx(line({0.0, 1.0, 3.0}));
    const Graph g = build_knn_gaussian_graph(idx, 1);
    // Node 2's nearest is node 1 at eps_1 = 2; node 1 does not pick node 2.
    CHECK(g.weight(2, 1) == doctest::Approx(std::exp(-4.0)));
    CHECK(g.weight(1, 2) == doctest::Approx(std::exp(-4.0)));
    CHECK(g.weight(0, 1) == doctest::Approx(2.0 * std::exp(-4.0)));
    CHECK(g.weight(0, 2) == 0.0);
    CHECK(g.weight(0, 0) == 0.0);
  }

  TEST_CASE("knn gaussian graph is symmetric with k edges per node before symmetrization") {
    const auto cloud = sample(Domain::ball(2, 1.0), Density::uniform(), 300, 2);
    const SpatialIndex idx(cloud);
    const Graph g = build_knn_gaussian_graph(idx, 8);
    CHECK(g.is_symmetric());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      CHECK(g.neighbors(i).size() >= 8);
      const double ek = idx.kth_neighbor_distance(i, 8);
      for (const auto& nb : idx.knn_of(i, 8)) {
        const double wi = std::exp(-4.0 * nb.distance * nb.distance / (ek * ek));
        CHECK(g.weight(i, nb.index) >= wi * (1.0 - 1e-12));
      }
    }
  }

  TEST_CASE("knn gaussian with duplicate points") {
    const SpatialIndex idx(PointCloud(2, {0.0, 0.0, 0.0, 0.0, 1.0, 0.0}));
    const Graph g = build_knn_gaussian_graph(idx, 1);
    CHECK(g.weight(0, 1) == doctest::Approx(2.0));
    CHECK(std::isfinite(g.degree(2)));
  }

  TEST_CASE("laplacian of constants and of sqrt degree") {
    const auto cloud = sample(Domain::ball(2, 1.0), Density::uniform(), 300, 3);
    const SpatialIndex idx(cloud);
    const auto k = Kernel::indicator(2);
    const Graph g = build_epsilon_graph(idx, 0.3, k);
    const std::vector<double> ones(cloud.size(), 3.0);
    for (double v : apply_laplacian(g, k, ones, 0.3, Normalization::unnormalized)) CHECK(v == doctest::Approx(0.0));
    std::vector<double> sq(cloud.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::sqrt(g.degree(i));
    for (double v : apply_laplacian(g, k, sq, 0.3, Normalization::symmetric)) {
      CHECK(std::abs(v) < 1e-10);
    }
  }

  TEST_CASE("two-node laplacian") {
    const SpatialIndex idx(PointCloud(2, {0.0, 0.0, 0.5, 0.0}));
    const auto k = Kernel::indicator(2);
    const Graph g = build_epsilon_graph(idx, 1.0, k);
    const std::vector<double> u{0.0, 1.0};
    const auto lu = apply_laplacian(g, k, u, 1.0, Normalization::unnormalized);
    const double scale = 2.0 / (0.25 * 2.0 * 1.0);
    CHECK(lu[0] == doctest::Approx(scale / std::numbers::pi));
    CHECK(lu[1] == doctest::Approx(-scale / std::numbers::pi));
    CHECK(laplacian_scale(k, 2, 1.0) == doctest::Approx(scale));
  }

  TEST_CASE("symmetric normalization rejects isolated nodes") {
    const SpatialIndex idx(PointCloud(2, {0.0, 0.0, 5.0, 5.0, 0.1, 0.0}));
    const auto k = Kernel::indicator(2);
    const Graph g = build_epsilon_graph(idx, 0.5, k);
    CHECK(g.isolated_count() == 1);
    const std::vector<double> u{1.0, 2.0, 3.0};
    CHECK_THROWS_WITH_AS(apply_laplacian(g, k, u, 0.5, Normalization::symmetric), doctest::Contains("1"), Error);
  }

  TEST_CASE("laplacian is self-adjoint") {
    const auto cloud = sample(Domain::box({1.0, 1.0}), Density::uniform(), 500, 4);
    const SpatialIndex idx(cloud);
    const auto k = Kernel::bump(2);
    const Graph g = build_epsilon_graph(idx, 0.12, k);
    Rng rng(5);
    std::vector<double> u(cloud.size()), v(cloud.size());
    for (auto& x : u) x = rng.gaussian();
    for (auto& x : v) x = rng.gaussian();
    const auto lu = apply_laplacian(g, k, u, 0.12, Normalization::unnormalized);
    const auto lv = apply_laplacian(g, k, v, 0.12, Normalization::unnormalized);
    const double a = std::inner_product(u.begin(), u.end(), lv.begin(), 0.0);
    const double b = std::inner_product(v.begin(), v.end(), lu.begin(), 0.0);
    CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), std::abs(b)));

    const auto A = laplacian_matrix(g, k, 0.12, Normalization::unnormalized);
    const auto au = A.multiply(u);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(au[i] == doctest::Approx(-lu[i]));
  }

  TEST_CASE("pointwise consistency on |x|^2") {
    const Domain d = Domain::ball(2, 1.0);
    const auto cloud = sample(d, Density::uniform(), 40000, 6);
    const SpatialIndex idx(cloud);
    const auto k = Kernel::indicator(2);
    const double eps = 0.15;
    const Graph g = build_epsilon_graph(idx, eps, k);
    std::vector<double> u(cloud.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = dot(cloud[i], cloud[i]);
    const auto lu = apply_laplacian(g, k, u, eps, Normalization::unnormalized);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (norm(cloud[i]) < 1.0 - eps) {
        sum += lu[i];
        ++count;
      }
    }
    CHECK(sum / static_cast<double>(count) == doctest::Approx(4.0 / std::numbers::pi).epsilon(0.03));
  }
}

TEST_SUITE("eikonal") {
  TEST_CASE("single edge and chain") {
    const SpatialIndex pair(line({0.0, 0.5}));
    CHECK(solve_eikonal(pair, 0.5, std::vector<std::size_t>{0}).u == std::vector<double>{0.0, 0.5});
    const SpatialIndex chain(line({0.0, 0.3, 0.6}));
    const auto sol = solve_eikonal(chain, 0.4, std::vector<std::size_t>{0});
    CHECK(sol.u[0] == 0.0);
    CHECK(sol.u[1] == doctest::Approx(0.3));
    CHECK(sol.u[2] == doctest::Approx(0.6));
    CHECK(sol.unreachable == 0);
  }

  TEST_CASE("unreachable nodes and empty boundary") {
    const SpatialIndex idx(line({0.0, 0.1, 5.0}));
    const auto sol = solve_eikonal(idx, 0.2, std::vector<std::size_t>{0});
    CHECK(sol.u[2] == kUnreachable);
    CHECK(sol.unreachable == 1);
    CHECK_THROWS_AS(solve_eikonal(idx, 0.2, std::vector<std::size_t>{}), Error);
  }

  TEST_CASE("matches Bellman-Ford exactly") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto cloud = sample(Domain::box({1.0, 1.0}), Density::uniform(), 500, 50 + s);
      const SpatialIndex idx(cloud);
      const std::vector<std::size_t> boundary{0, 7, 99};
      const auto sol = solve_eikonal(idx, 0.09, boundary);
      CHECK(sol.u == oracle::bellman_ford(cloud.size(), brute_edges(cloud, 0.09), boundary));
    }
  }

  TEST_CASE("graph overload agrees with the index form") {
    const auto cloud = sample(Domain::ball(2, 0.5), Density::uniform(), 400, 7);
    const SpatialIndex idx(cloud);
    const std::vector<std::size_t> b{3, 4};
    const Graph g = build_epsilon_graph(idx, 0.1, Kernel::indicator(2));
    CHECK(solve_eikonal(g, cloud, b).u == solve_eikonal(idx, 0.1, b).u);
  }

  TEST_CASE("DPP defect and Lipschitz bound") {
    const auto cloud = sample(Domain::ball(2, 1.0), Density::uniform(), 2000, 8);
    const SpatialIndex idx(cloud);
    const double eps = 0.08;
    std::vector<std::size_t> boundary;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (norm(cloud[i]) > 0.95) boundary.push_back(i);
    }
    const auto sol = solve_eikonal(idx, eps, boundary);
    CHECK(eikonal_dpp_defect(idx, eps, sol.u, boundary) <= 1e-12 * 2.0);
    CHECK(sol.residual <= 1e-12 * 2.0);
    const auto edges = brute_edges(cloud, eps);
    for (std::size_t j : {5u, 500u, 1500u}) {
      const auto gd = oracle::bellman_ford(cloud.size(), edges, {j});
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (std::isfinite(gd[i]) && std::isfinite(sol.u[i])) CHECK(std::abs(sol.u[i] - sol.u[j]) <= gd[i] + 1e-12);
      }
    }
    for (auto b : boundary) CHECK(sol.u[b] == 0.0);
  }
}

TEST_SUITE("normal derivative") {
  TEST_CASE("constant and linear functions") {
    const PointCloud c(2, {0.0, 0.0, 0.0, 0.1, 0.3, 0.3});
    const SpatialIndex idx(c);
    const std::vector<double> nu{0.0, 1.0};
    const std::vector<double> cst(3, 2.5);
    CHECK(normal_derivative(idx, cst, 0, 0.1, nu) == 0.0);
    std::vector<double> lin(3);
    for (std::size_t i = 0; i < 3; ++i) lin[i] = c[i][1];
    CHECK(normal_derivative(idx, lin, 0, 0.1, nu) == doctest::Approx(1.0));
    CHECK(normal_probe(idx, 0, 0.1, nu) == 1);
  }

  TEST_CASE("dense grid") {
    std::vector<double> v;
    const double h = 0.01;
    for (int i = 0; i <= 100; ++i) {
      for (int j = 0; j <= 100; ++j) v.insert(v.end(), {i * h + 0.003 * ((i * 7 + j) % 3), j * h});
    }
    const PointCloud c(2, v);
    const SpatialIndex idx(c);
    std::vector<double> u(c.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = c[i][1];
    const std::vector<double> nu{0.0, 1.0};
    const double eps = 0.137;
    for (std::size_t i : {3080u, 5070u, 7140u}) CHECK(std::abs(normal_derivative(idx, u, i, eps, nu) - 1.0) <= h / eps);
  }
}

TEST_SUITE("robin") {
  TEST_CASE("constant Dirichlet data gives a constant solution") {
    const auto cloud = sample(Domain::ball(2, 1.0), Density::uniform(), 800, 9);
    const SpatialIndex idx(cloud);
    const auto k = Kernel::indicator(2);
    const Graph g = build_epsilon_graph(idx, 0.2, k);
    BoundaryConditions bc;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (norm(cloud[i]) > 0.9) bc.boundary.push_back(i);
    }
    bc.robin_gamma = 1.0;
    bc.f.assign(cloud.size(), 0.0);
    bc.g.assign(cloud.size(), 1.75);
    const auto sol = solve_robin(idx, g, k, 0.2, bc);
    for (double x : sol.u) CHECK(x == doctest::Approx(1.75).epsilon(1e-7));
    CHECK(sol.residual <= 1e-8);
  }

  TEST_CASE("five-node path against a dense solve") {
    const PointCloud c = line({0.0, 0.125, 0.25, 0.375, 0.5});
    const SpatialIndex idx(c);
    const auto k = Kernel::indicator(1);
    const double eps = 0.125;
    const Graph g = build_epsilon_graph(idx, eps, k);
    // Indicator in 1-D: eta = 1/2, sigma = 1/3; scale 2 / (sigma n eps^3).
    const double w = 0.5, s = 2.0 / ((1.0 / 3.0) * 5.0 * eps * eps * eps);
    std::vector<double> f{0.0, 1.0, -2.0, 0.5, 0.0};

    for (double gamma : {1.0, 0.5}) {
      BoundaryConditions bc;
      bc.boundary = {0, 4};
      bc.robin_gamma = gamma;
      bc.f = f;
      bc.g = {0.0, 0.0, 0.0, 0.0, 0.5};
      if (gamma < 1.0) bc.normals = unit_normals_1d(5, {{0, 1.0}, {4, -1.0}});
      const auto sol = solve_robin(idx, g, k, eps, bc, 1e-12);

      std::vector<double> a(25, 0.0), b(5, 0.0);
      for (std::size_t i = 1; i < 4; ++i) {
        a[i * 5 + i] = 2.0 * s * w;
        a[i * 5 + i - 1] = -s * w;
        a[i * 5 + i + 1] = -s * w;
        b[i] = f[i];
      }
      // boundary rows: gamma u_i - (1 - gamma)(u_p - u_i) / eps = g_i, p the inward neighbour
      a[0] = gamma + (1.0 - gamma) / eps;
      a[1] = -(1.0 - gamma) / eps;
      a[24] = gamma + (1.0 - gamma) / eps;
      a[23] = -(1.0 - gamma) / eps;
      b[0] = 0.0;
      b[4] = 0.5;
      const auto x = oracle::dense_solve(a, b);
      for (std::size_t i = 0; i < 5; ++i) CHECK(sol.u[i] == doctest::Approx(x[i]).epsilon(1e-9));
    }
  }

  TEST_CASE("pure Neumann and missing normals are rejected") {
    const SpatialIndex idx(line({0.0, 0.1, 0.2}));
    const auto k = Kernel::indicator(1);
    const Graph g = build_epsilon_graph(idx, 0.1, k);
    BoundaryConditions bc;
    bc.boundary = {0};
    bc.f.assign(3, 0.0);
    bc.g.assign(3, 0.0);
    bc.robin_gamma = 0.0;
    CHECK_THROWS_AS(solve_robin(idx, g, k, 0.1, bc), Error);
    bc.robin_gamma = 0.5;
    CHECK_THROWS_AS(solve_robin(idx, g, k, 0.1, bc), Error);
    bc.robin_gamma = 1.0;
    bc.boundary.clear();
    CHECK_THROWS_AS(solve_robin(idx, g, k, 0.1, bc), Error);
  }

  TEST_CASE("maximum principle on random small systems") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto cloud = sample(Domain::ball(2, 1.0), Density::uniform(), 60, 200 + s);
      const SpatialIndex idx(cloud);
      const auto k = Kernel::indicator(2);
      const double eps = 0.5;
      const Graph g = build_epsilon_graph(idx, eps, k);
      BoundaryConditions bc;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (norm(cloud[i]) > 0.8) bc.boundary.push_back(i);
      }
      Rng rng(s);
      bc.robin_gamma = 0.2 + 0.8 * rng.uniform();
      bc.f.assign(cloud.size(), 0.0);
      bc.g.resize(cloud.size());
      for (auto& x : bc.g) x = -rng.uniform();
      bc.normals = estimate_normals(idx, 0.5, Order::second);
      const auto sol = solve_robin(idx, g, k, eps, bc, 1e-12);
      for (double x : sol.u) CHECK(x <= 1e-7);
      std::vector<double> rhs;
      const auto A = robin_matrix(idx, g, k, eps, bc, &rhs);
      std::vector<double> dense(cloud.size() * cloud.size(), 0.0);
      for (std::size_t r = 0; r < A.rows; ++r) {
        for (std::size_t p = A.offsets[r]; p < A.offsets[r + 1]; ++p) dense[r * cloud.size() + A.indices[p]] += A.values[p];
      }
      const auto x = oracle::dense_solve(dense, rhs);
      for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x[i] - sol.u[i]) <= 1e-7);
    }
  }

  TEST_CASE("sparse solver reports its residual") {
    SparseMatrix a;
    a.cols = 2;
    a.push(0, 4.0);
    a.push(1, 1.0);
    a.end_row();
    a.push(0, 1.0);
    a.push(1, 3.0);
    a.end_row();
    const std::vector<double> b{1.0, 2.0};
    const auto r = solve_sparse(a, b);
    CHECK(r.x[0] == doctest::Approx(1.0 / 11.0));
    CHECK(r.x[1] == doctest::Approx(7.0 / 11.0));
    CHECK(r.residual <= 1e-8);
  }
}

TEST_SUITE("eigen") {
  TEST_CASE("three-node path") {
    const SpatialIndex idx(line({0.0, 0.125, 0.25}));
    const auto k = Kernel::indicator(1);
    const Graph g = build_epsilon_graph(idx, 0.125, k);
    const auto sol = solve_dirichlet_eigen(g, k, 0.125, std::vector<std::size_t>{0, 2}, Normalization::unnormalized);
    CHECK(sol.u == std::vector<double>{0.0, 1.0, 0.0});
    // 1 x 1 problem: lambda = scale * degree of the middle node.
    REQUIRE(sol.lambda.has_value());
    CHECK(*sol.lambda == doctest::Approx(laplacian_scale(k, 3, 0.125) * g.degree(1)));
  }

  TEST_CASE("eigenvector is one-signed and satisfies the eigen equation") {
    const auto cloud = sample(Domain::ball(2, 1.0), Density::uniform(), 1500, 10);
    const SpatialIndex idx(cloud);
    const auto k = Kernel::indicator(2);
    const double eps = 0.15;
    const Graph g = build_epsilon_graph(idx, eps, k);
    std::vector<std::size_t> boundary;
    std::vector<std::uint8_t> is_b(cloud.size(), 0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (norm(cloud[i]) > 0.93) {
        boundary.push_back(i);
        is_b[i] = 1;
      }
    }
    for (auto norm_kind : {Normalization::unnormalized, Normalization::symmetric}) {
      const auto sol = solve_dirichlet_eigen(g, k, eps, boundary, norm_kind);
      CHECK(*std::max_element(sol.u.begin(), sol.u.end()) == doctest::Approx(1.0));
      const auto A = laplacian_matrix(g, k, eps, norm_kind);
      const auto au = A.multiply(sol.u);
      double defect = 0.0;
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (is_b[i]) {
          CHECK(sol.u[i] == 0.0);
        } else {
          CHECK(sol.u[i] > 0.0);
          defect = std::max(defect, std::abs(au[i] - *sol.lambda * sol.u[i]));
        }
      }
      CHECK(defect <= 1e-5 * *sol.lambda);
      CHECK(*sol.lambda > 0.0);
    }
  }

  TEST_CASE("empty interior is an error") {
    const SpatialIndex idx(line({0.0, 0.1}));
    const auto k = Kernel::indicator(1);
    const Graph g = build_epsilon_graph(idx, 0.1, k);
    CHECK_THROWS_AS(solve_dirichlet_eigen(g, k, 0.1, std::vector<std::size_t>{0, 1}, Normalization::unnormalized),
                    Error);
  }
}

TEST_SUITE("depth") {
  TEST_CASE("two blobs rank their centres first") {
    const Domain blob = Domain::ball(2, 0.5);
    const auto a = sample(blob, Density::uniform(), 600, 11);
    const auto b = sample(blob, Density::uniform(), 600, 12);
    std::vector<double> v(a.coords());
    for (std::size_t i = 0; i < b.size(); ++i) v.insert(v.end(), {b[i][0] + 3.0, b[i][1]});
    const PointCloud cloud(2, v);
    for (auto method : {DepthMethod::eikonal, DepthMethod::eigen}) {
      const auto res = depth_rank(cloud, 10, 10.0, method);
      const auto top = cloud[res.ranking.front()];
      const double to_centre = std::min(norm(top), std::hypot(top[0] - 3.0, top[1]));
      CHECK(to_centre < 0.25);
    }
  }

  TEST_CASE("p = 100 makes every depth zero") {
    const auto cloud = sample(Domain::ball(2, 0.5), Density::uniform(), 200, 13);
    const auto res = depth_rank(cloud, 10, 100.0, DepthMethod::eikonal);
    for (double d : res.depth) CHECK(d == 0.0);
  }

  TEST_CASE("permutation equivariance") {
    const auto cloud = sample(Domain::ball(2, 0.5), Density::uniform(), 500, 14);
    std::vector<std::size_t> order(cloud.size());
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    const auto perm = cloud.permuted(order);
    const auto a = depth_rank(cloud, 10, 10.0, DepthMethod::eikonal);
    const auto b = depth_rank(perm, 10, 10.0, DepthMethod::eikonal);
    for (std::size_t i = 0; i < cloud.size(); ++i) CHECK(b.depth[i] == doctest::Approx(a.depth[order[i]]));
    CHECK(order[b.ranking.front()] == a.ranking.front());
  }
}
