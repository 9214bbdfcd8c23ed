#include "pcb/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "pcb/error.hpp"
#include "pcb/graph.hpp"
#include "pcb/normals.hpp"
#include "pcb/parallel.hpp"
#include "pcb/pde.hpp"
#include "pcb/population.hpp"
#include "pcb/random.hpp"
#include "pcb/spatial.hpp"

namespace pcb {
namespace {

using nlohmann::json;

std::string order_name(Order o) { return o == Order::first ? "first" : "second"; }

Order order_from(const std::string& s) {
  if (s == "first" || s == "1") return Order::first;
  if (s == "second" || s == "2") return Order::second;
  throw Error("unknown order '" + s + "'");
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::vector<std::vector<double>> true_normals(const GroundTruth& truth, const PointCloud& cloud) {
  std::vector<std::vector<double>> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    try {
      out[i] = truth.normal(cloud[i]);
    } catch (const Error&) {
      out[i].assign(cloud.dim(), 0.0);  // medial axis: degenerate
    }
  }
  return out;
}

std::vector<std::uint64_t> trial_seeds(std::uint64_t seed, std::size_t trials) {
  std::vector<std::uint64_t> s(trials);
  for (std::size_t t = 0; t < trials; ++t) s[t] = seed + t;
  return s;
}

std::vector<std::size_t> indices_where(const std::vector<std::uint8_t>& labels) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) out.push_back(i);
  }
  return out;
}

std::vector<double> kth_radii(const SpatialIndex& index, std::size_t k) {
  std::vector<double> radii(index.size());
  parallel_for(index.size(), [&](std::size_t i) { radii[i] = index.kth_neighbor_distance(i, k); });
  return radii;
}

// Mean TFR over trials at size n; +inf when a trial has no true boundary points.
double mean_tfr(const ScalingConfig& cfg, double eps, std::size_t n) {
  const double r = std::sqrt(eps);
  const GroundTruth truth(cfg.domain);
  double sum = 0.0;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const PointCloud cloud = sample(cfg.domain, cfg.density, n, cfg.seed + t);
    const SpatialIndex index(cloud);
    const auto dist = estimate_distances(index, r, cfg.order, NeighborPolicy::flag);
    const auto labels = boundary_test(dist.d_hat, eps);
    const auto mask = evaluation_mask(cfg.domain, cloud, r);
    try {
      sum += detection_metrics(labels.label, truth.distances(cloud), eps, mask).TFR;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return sum / static_cast<double>(cfg.trials);
}

}  // namespace

// ---------------------------------------------------------------------------

double manufactured_solution(std::span<const double> x) {
  const double s = 2.0 * x[0] * x[0];
  return std::sin(s) - std::cos(s);
}

std::vector<double> manufactured_gradient(std::span<const double> x) {
  const double s = 2.0 * x[0] * x[0];
  std::vector<double> g(x.size(), 0.0);
  g[0] = 4.0 * x[0] * (std::cos(s) + std::sin(s));
  return g;
}

double manufactured_laplacian(std::span<const double> x) {
  const double s = 2.0 * x[0] * x[0];
  const double x2 = x[0] * x[0];
  return 4.0 * std::cos(s) - 16.0 * x2 * std::sin(s) + 4.0 * std::sin(s) + 16.0 * x2 * std::cos(s);
}

double disk_eigenfunction(std::span<const double> x) { return std::cyl_bessel_j(0.0, kJ0Root * norm(x)); }

json to_json(const Domain& domain) {
  const auto& s = domain.shape();
  if (const auto* b = std::get_if<Ball>(&s)) return {{"kind", "ball"}, {"dim", domain.dim()}, {"radius", b->radius}};
  if (const auto* a = std::get_if<Annulus>(&s)) {
    return {{"kind", "annulus"},
            {"dim", domain.dim()},
            {"inner", a->inner},
            {"outer", a->outer},
            {"boundary", a->boundary == AnnulusBoundary::inner ? "inner" : "both"}};
  }
  return {{"kind", "box"}, {"sides", std::get<Box>(s).sides}};
}

json to_json(const Density& density) {
  if (density.kind() == Density::Kind::uniform) return {{"kind", "uniform"}};
  return {{"kind", "sinusoidal"}, {"lipschitz", density.lipschitz()}};
}

Domain domain_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ball") return Domain::ball(j.value("dim", std::size_t{2}), j.at("radius").get<double>());
  if (kind == "annulus") {
    const auto sel = j.value("boundary", std::string("inner"));
    if (sel != "inner" && sel != "both") throw Error("annulus boundary must be 'inner' or 'both'");
    return Domain::annulus(j.value("dim", std::size_t{2}), j.at("inner").get<double>(), j.at("outer").get<double>(),
                           sel == "inner" ? AnnulusBoundary::inner : AnnulusBoundary::both);
  }
  if (kind == "box") return Domain::box(j.at("sides").get<std::vector<double>>());
  throw Error("unknown domain kind '" + kind + "'");
}

Density density_from_json(const json& j) {
  const std::string kind = j.value("kind", std::string("uniform"));
  if (kind == "uniform") return Density::uniform();
  if (kind == "sinusoidal") return Density::sinusoidal(j.at("lipschitz").get<double>());
  throw Error("unknown density kind '" + kind + "'");
}

std::vector<std::uint8_t> evaluation_mask(const Domain& domain, const PointCloud& cloud, double r) {
  std::vector<std::uint8_t> mask(cloud.size(), 1);
  if (const auto* a = std::get_if<Annulus>(&domain.shape())) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const double rx = norm(cloud[i]);
      mask[i] = (rx >= a->inner && rx <= a->outer - r) ? 1 : 0;
    }
  }
  return mask;
}

// ---------------------------------------------------------------------------

ExperimentReport run_tfr_sweep(const TfrSweepConfig& cfg) {
  if (cfg.trials == 0) throw Error("tfr sweep needs trials >= 1");
  if (cfg.r_grid.empty() || cfg.orders.empty()) throw Error("tfr sweep needs a radius grid and at least one order");
  ExperimentReport rep;
  rep.name = "tfr_sweep";
  json orders = json::array();
  for (Order o : cfg.orders) orders.push_back(order_name(o));
  rep.config = {{"domain", to_json(cfg.domain)}, {"density", to_json(cfg.density)}, {"n", cfg.n},
                {"eps", cfg.eps},                {"r_grid", cfg.r_grid},             {"orders", orders},
                {"true_normals", cfg.true_normals}, {"trials", cfg.trials},          {"seed", cfg.seed}};
  rep.seeds = trial_seeds(cfg.seed, cfg.trials);
  rep.columns = {"r", "order", "normals", "test", "FNR", "FPR", "TFR", "TFR_std", "insufficient", "trials"};

  struct Acc {
    std::vector<double> fnr, fpr, tfr;
    std::int64_t insufficient = 0;
  };
  // key: (r index, order, source)
  std::map<std::tuple<std::size_t, int, int>, Acc> acc;
  const GroundTruth truth(cfg.domain);
  for (std::uint64_t s : rep.seeds) {
    const PointCloud cloud = sample(cfg.domain, cfg.density, cfg.n, s);
    const SpatialIndex index(cloud);
    const auto dtrue = truth.distances(cloud);
    const auto nu_true = cfg.true_normals ? true_normals(truth, cloud) : std::vector<std::vector<double>>{};
    for (std::size_t ri = 0; ri < cfg.r_grid.size(); ++ri) {
      const double r = cfg.r_grid[ri];
      const auto mask = evaluation_mask(cfg.domain, cloud, r);
      for (Order o : cfg.orders) {
        for (int source = 0; source < (cfg.true_normals ? 2 : 1); ++source) {
          DistanceEstimate dist;
          if (source == 0) {
            dist = estimate_distances(index, r, o, NeighborPolicy::flag);
          } else {
            const auto given = normals_from_vectors(nu_true, o);
            dist = estimate_distances(index, r, o, NeighborPolicy::flag, given);
          }
          const auto labels = boundary_test(dist.d_hat, cfg.eps);
          const auto m = detection_metrics(labels.label, dtrue, cfg.eps, mask);
          auto& a = acc[{ri, static_cast<int>(o), source}];
          a.fnr.push_back(m.FNR);
          a.fpr.push_back(m.FPR);
          a.tfr.push_back(m.TFR);
          a.insufficient += static_cast<std::int64_t>(dist.insufficient.size());
        }
      }
    }
  }
  for (std::size_t ri = 0; ri < cfg.r_grid.size(); ++ri) {
    for (Order o : cfg.orders) {
      for (int source = 0; source < (cfg.true_normals ? 2 : 1); ++source) {
        const auto& a = acc[{ri, static_cast<int>(o), source}];
        const std::string test = std::string(source ? "t" : "") + (o == Order::first ? "1st" : "2nd");
        rep.add_row({cfg.r_grid[ri], order_name(o), std::string(source ? "true" : "estimated"), test, mean(a.fnr),
                     mean(a.fpr), mean(a.tfr), stddev(a.tfr), a.insufficient,
                     static_cast<std::int64_t>(cfg.trials)});
      }
    }
  }
  return rep;
}

ExperimentReport run_scaling_sweep(const ScalingConfig& cfg) {
  if (cfg.trials == 0) throw Error("scaling sweep needs trials >= 1");
  if (cfg.n_start < 2 || cfg.n_cap < cfg.n_start) throw Error("scaling sweep needs 2 <= n_start <= n_cap");
  ExperimentReport rep;
  rep.name = "scaling_sweep";
  rep.config = {{"domain", to_json(cfg.domain)},   {"density", to_json(cfg.density)}, {"eps_grid", cfg.eps_grid},
                {"tfr_threshold", cfg.tfr_threshold}, {"n_start", cfg.n_start},      {"n_cap", cfg.n_cap},
                {"trials", cfg.trials},            {"order", order_name(cfg.order)}, {"seed", cfg.seed},
                {"r", "sqrt(eps)"}};
  rep.seeds = trial_seeds(cfg.seed, cfg.trials);
  rep.columns = {"eps", "r", "n_min", "tfr_at_n_min", "censored"};

  std::vector<double> xs, ys;
  for (double eps : cfg.eps_grid) {
    auto ok = [&](std::size_t n, double* tfr) {
      *tfr = mean_tfr(cfg, eps, n);
      return *tfr <= cfg.tfr_threshold;
    };
    double tfr = 0.0, tfr_hi = 0.0;
    std::size_t lo = 0, hi = 0;
    std::size_t n = cfg.n_start;
    if (ok(n, &tfr)) {
      hi = n;
      tfr_hi = tfr;
      // Walk down so the bracket is tight.
      while (hi / 2 >= 2) {
        double t2 = 0.0;
        if (!ok(hi / 2, &t2)) {
          lo = hi / 2;
          break;
        }
        hi /= 2;
        tfr_hi = t2;
      }
    } else {
      lo = n;
      while (true) {
        const std::size_t next = std::min(lo * 2, cfg.n_cap);
        if (ok(next, &tfr)) {
          hi = next;
          tfr_hi = tfr;
          break;
        }
        lo = next;
        if (next == cfg.n_cap) break;
      }
    }
    if (hi == 0) {
      rep.add_row({eps, std::sqrt(eps), static_cast<std::int64_t>(cfg.n_cap), tfr, std::int64_t{1}});
      continue;
    }
    while (lo > 0 && hi - lo > std::max<std::size_t>(1, hi / 50)) {
      const std::size_t mid = lo + (hi - lo) / 2;
      double tm = 0.0;
      if (ok(mid, &tm)) {
        hi = mid;
        tfr_hi = tm;
      } else {
        lo = mid;
      }
    }
    rep.add_row({eps, std::sqrt(eps), static_cast<std::int64_t>(hi), tfr_hi, std::int64_t{0}});
    xs.push_back(eps);
    ys.push_back(static_cast<double>(hi));
  }
  if (xs.size() >= 2) rep.fits.emplace_back("n_vs_eps", fit_loglog(xs, ys));
  std::int64_t censored = 0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) censored += static_cast<std::int64_t>(rep.number(i, "censored"));
  rep.summary = {{"censored", censored}, {"uncensored", xs.size()}};
  return rep;
}

ExperimentReport run_distance_scatter(const Domain& domain, const Density& density, std::size_t n, double eps,
                                      double r, std::uint64_t seed) {
  ExperimentReport rep;
  rep.name = "distance_scatter";
  rep.config = {{"domain", to_json(domain)}, {"density", to_json(density)}, {"n", n},
                {"eps", eps},                {"r", r},                      {"seed", seed}};
  rep.seeds = {seed};
  rep.columns = {"index", "d_true", "d_hat1", "d_hat2"};
  const PointCloud cloud = sample(domain, density, n, seed);
  const SpatialIndex index(cloud);
  const auto dtrue = GroundTruth(domain).distances(cloud);
  const auto d1 = estimate_distances(index, r, Order::first, NeighborPolicy::flag).d_hat;
  const auto d2 = estimate_distances(index, r, Order::second, NeighborPolicy::flag).d_hat;
  const auto mask = evaluation_mask(domain, cloud, r);
  // [0]: every listed point, [1]: the true boundary strip d_true <= eps
  std::vector<double> e1[2], e2[2], a1[2], a2[2];
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i] || dtrue[i] > r) continue;
    rep.add_row({static_cast<std::int64_t>(i), dtrue[i], d1[i], d2[i]});
    for (int s = 0; s < 2; ++s) {
      if (s == 1 && dtrue[i] > eps) continue;
      e1[s].push_back(d1[i] - dtrue[i]);
      e2[s].push_back(d2[i] - dtrue[i]);
      a1[s].push_back(std::abs(d1[i] - dtrue[i]));
      a2[s].push_back(std::abs(d2[i] - dtrue[i]));
    }
  }
  for (int s = 0; s < 2; ++s) {
    rep.summary[s ? "strip" : "all"] = {{"points", e1[s].size()},         {"mean_error_first", mean(e1[s])},
                                        {"mean_error_second", mean(e2[s])}, {"mae_first", mean(a1[s])},
                                        {"mae_second", mean(a2[s])}};
  }
  return rep;
}

ExperimentReport run_eikonal_convergence(const EikonalConvergenceConfig& cfg) {
  if (cfg.trials == 0 || cfg.n_grid.size() < 2) throw Error("eikonal convergence needs trials >= 1 and two sizes");
  const Domain& domain = cfg.domain;
  const std::size_t d = domain.dim();
  const double rho = 1.0 / domain.volume();
  const double wd = unit_ball_volume(d);
  const GroundTruth truth(domain);

  ExperimentReport rep;
  rep.name = "eikonal_convergence";
  rep.config = {{"domain", to_json(domain)}, {"density", to_json(Density::uniform())},
                {"n_grid", cfg.n_grid},      {"trials", cfg.trials},
                {"seed", cfg.seed},          {"k", "round(10 n^(1/5))"},
                {"order", "second"}};
  rep.seeds = trial_seeds(cfg.seed, cfg.trials);
  rep.columns = {"n", "k", "eps", "eps_boundary", "error", "error_std", "boundary_points", "unreachable",
                 "boundary_u_max"};
  std::vector<double> xs, ys;
  for (std::size_t n : cfg.n_grid) {
    const auto k = static_cast<std::size_t>(std::lround(10.0 * std::pow(static_cast<double>(n), 0.2)));
    const double nn = static_cast<double>(n);
    const double eps = std::pow(static_cast<double>(k) / (wd * rho * nn), 1.0 / static_cast<double>(d));
    const double eps_b = std::pow(static_cast<double>(k) / (36.0 * wd * rho * nn), 1.0 / static_cast<double>(d));
    std::vector<double> errs;
    double nb = 0.0, unreachable = 0.0, bmax = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const PointCloud cloud = sample(domain, Density::uniform(), n, cfg.seed + t);
      const SpatialIndex index(cloud);
      const auto radii = kth_radii(index, k);
      const auto dist = estimate_distances(index, Radii(radii), Order::second, NeighborPolicy::flag);
      const auto boundary = indices_where(boundary_test(dist.d_hat, eps_b).label);
      if (boundary.empty()) throw Error("eikonal convergence: no boundary points detected at n = " + std::to_string(n));
      const auto sol = solve_eikonal(index, eps, boundary);
      const auto dtrue = truth.distances(cloud);
      double e = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (sol.u[i] == kUnreachable) continue;
        e = std::max(e, std::abs(sol.u[i] - dtrue[i]));
      }
      for (std::size_t b : boundary) bmax = std::max(bmax, std::abs(sol.u[b]));
      errs.push_back(e);
      nb += static_cast<double>(boundary.size());
      unreachable += static_cast<double>(sol.unreachable);
    }
    const double tr = static_cast<double>(cfg.trials);
    rep.add_row({static_cast<std::int64_t>(n), static_cast<std::int64_t>(k), eps, eps_b, mean(errs), stddev(errs),
                 nb / tr, unreachable / tr, bmax});
    xs.push_back(eps);
    ys.push_back(mean(errs));
  }
  rep.fits.emplace_back("error_vs_eps", fit_loglog(xs, ys));
  return rep;
}

ExperimentReport run_secondorder_convergence(const SecondOrderConfig& cfg) {
  if (cfg.trials == 0 || cfg.n_grid.size() < 3) throw Error("second-order convergence needs trials >= 1 and three sizes");
  const bool robin = cfg.problem == SecondOrderProblem::robin;
  const Domain domain = Domain::ball(2, 1.0);
  const double rho = 1.0 / std::numbers::pi;
  const Kernel kernel = Kernel::indicator(2);

  ExperimentReport rep;
  rep.name = robin ? "robin_convergence" : "eigen_convergence";
  rep.config = {{"problem", robin ? "robin" : "eigen"},
                {"domain", to_json(domain)},
                {"density", to_json(Density::uniform())},
                {"n_grid", cfg.n_grid},
                {"trials", cfg.trials},
                {"seed", cfg.seed},
                {"eps", "0.25 (log n / n)^(1/6)"},
                {"k", "round(2 pi n eps^2)"},
                {"kernel", "indicator"}};
  if (robin) rep.config["robin_gamma"] = cfg.robin_gamma;
  rep.seeds = trial_seeds(cfg.seed, cfg.trials);
  rep.columns = {"n", "eps", "k", "error", "error_std", "boundary_points", "degenerate_normals", "lambda"};

  std::vector<double> xs, ys;
  for (std::size_t n : cfg.n_grid) {
    const double nn = static_cast<double>(n);
    const double eps = 0.25 * std::pow(std::log(nn) / nn, 1.0 / 6.0);
    const auto k = static_cast<std::size_t>(std::lround(2.0 * std::numbers::pi * nn * eps * eps));
    std::vector<double> errs, lambdas;
    double nb = 0.0, degen = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      const PointCloud cloud = sample(domain, Density::uniform(), n, cfg.seed + t);
      const SpatialIndex index(cloud);
      const auto radii = kth_radii(index, k);
      const auto normals = estimate_normals(index, Radii(radii), Order::second);
      const auto dist = estimate_distances(index, Radii(radii), Order::second, NeighborPolicy::flag, normals);
      const auto boundary = indices_where(boundary_test(dist.d_hat, eps).label);
      if (boundary.empty()) throw Error("second-order convergence: no boundary points detected");
      const Graph graph = build_epsilon_graph(index, eps, kernel);
      double e = 0.0;
      if (robin) {
        BoundaryConditions bc;
        bc.boundary = boundary;
        bc.robin_gamma = cfg.robin_gamma;
        bc.f.assign(n, 0.0);
        bc.g.assign(n, 0.0);
        bc.normals = normals;
        for (std::size_t i = 0; i < n; ++i) {
          const auto x = cloud[i];
          bc.f[i] = -rho * manufactured_laplacian(x);
          const double rx = norm(x);
          const auto grad = manufactured_gradient(x);
          const double dnu = rx > 0.0 ? -(grad[0] * x[0] + grad[1] * x[1]) / rx : 0.0;
          bc.g[i] = cfg.robin_gamma * manufactured_solution(x) - (1.0 - cfg.robin_gamma) * dnu;
        }
        const auto sol = solve_robin(index, graph, kernel, eps, bc);
        for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(sol.u[i] - manufactured_solution(cloud[i])));
        degen += static_cast<double>(sol.degenerate_normals);
      } else {
        const auto sol = solve_dirichlet_eigen(graph, kernel, eps, boundary, Normalization::unnormalized);
        for (std::size_t i = 0; i < n; ++i) {
          e = std::max(e, std::abs(sol.u[i] - disk_eigenfunction(cloud[i])));
        }
        lambdas.push_back(*sol.lambda);
      }
      errs.push_back(e);
      nb += static_cast<double>(boundary.size());
    }
    const double tr = static_cast<double>(cfg.trials);
    rep.add_row({static_cast<std::int64_t>(n), eps, static_cast<std::int64_t>(k), mean(errs), stddev(errs), nb / tr,
                 degen / tr, robin ? 0.0 : mean(lambdas)});
    xs.push_back(eps);
    ys.push_back(mean(errs));
  }
  rep.fits.emplace_back("all", fit_loglog(xs, ys));
  const std::size_t m = xs.size();
  rep.fits.emplace_back("last_three", fit_loglog(std::span(xs).subspan(m - 3), std::span(ys).subspan(m - 3)));
  if (!robin) rep.summary["lambda_continuum"] = kJ0Root * kJ0Root * rho;
  return rep;
}

std::vector<std::vector<double>> near_boundary_points(const Domain& domain, std::size_t count, double max_dist,
                                                      std::uint64_t seed) {
  const GroundTruth truth(domain);
  const auto [lo, hi] = domain.bounding_box();
  Rng rng(seed);
  std::vector<std::vector<double>> out;
  std::vector<double> x(domain.dim());
  std::uint64_t tries = 0;
  while (out.size() < count) {
    if (++tries > 100'000'000ULL) throw Error("near_boundary_points: strip too thin to sample");
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = rng.uniform(lo[k], hi[k]);
    if (domain.contains(x) && truth.distance(x) <= max_dist) out.push_back(x);
  }
  return out;
}

ExperimentReport population_bias_check(const Domain& domain, const Density& density, const std::vector<double>& r_grid,
                                       const std::vector<std::vector<double>>& points) {
  const TheoryConstants c = theory_constants(domain, density, 3.0);
  const double R = domain.reach();
  const double factor = 7.0 * c.C_x / (R * c.C_y) + 1.0 / R;
  const PopulationOracle oracle(domain, density);
  const GroundTruth truth(domain);
  const double slack = 1e-12 * R;

  ExperimentReport rep;
  rep.name = "population_bias";
  rep.config = {{"domain", to_json(domain)}, {"density", to_json(density)}, {"r_grid", r_grid},
                {"points", points},          {"bound_factor", factor},      {"tolerance", slack}};
  rep.columns = {"point", "r", "d_true", "d_bar", "upper", "excess", "ok", "cells", "converged"};
  std::int64_t violations = 0;
  std::vector<double> xs, ys;
  for (double r : r_grid) {
    double sum = 0.0;
    for (std::size_t p = 0; p < points.size(); ++p) {
      const auto vb = oracle.v_bar(points[p], r);
      std::vector<double> nu = vb.value;
      const double nv = norm(nu);
      for (double& v : nu) v /= nv;
      const double dbar = oracle.max_projection(points[p], r, nu);
      const double dt = truth.distance(points[p]);
      const double upper = dt + factor * r * r;
      const bool ok = dbar >= dt - slack && dbar <= upper + slack;
      violations += ok ? 0 : 1;
      sum += dbar - dt;
      rep.add_row({static_cast<std::int64_t>(p), r, dt, dbar, upper, dbar - dt, std::int64_t{ok ? 1 : 0},
                   static_cast<std::int64_t>(vb.cells), std::int64_t{vb.converged ? 1 : 0}});
    }
    xs.push_back(r);
    ys.push_back(sum / static_cast<double>(points.size()));
  }
  bool positive = xs.size() >= 2;
  for (double y : ys) positive = positive && y > 1e-12;
  if (positive) rep.fits.emplace_back("excess_vs_r", fit_loglog(xs, ys));
  rep.summary = {{"violations", violations}, {"checks", rep.rows.size()}};
  return rep;
}

ExperimentReport normal_order_sweep(const NormalOrderConfig& cfg) {
  const double H = cfg.height;
  auto rho = [&](double x1, double x2) { return std::exp(cfg.beta * (x1 - 0.5) + cfg.alpha * (x1 - 0.5) * x2); };
  const double envelope = std::exp(std::abs(cfg.beta) / 2.0 + std::abs(cfg.alpha) * H / 2.0);
  if (cfg.trials == 0 || cfg.r_grid.size() < 2) throw Error("normal order sweep needs trials >= 1 and two radii");
  for (double r : cfg.r_grid) {
    // theta_hat at the neighbours reaches 3r/2 from a probe.
    if (!(r > 0.0) || 0.5 - cfg.probe_halfwidth - 1.5 * r <= 0.0 || cfg.probe_depth + 1.5 * r >= H) {
      throw Error("normal order sweep: radius " + format_double(r) + " reaches another face of the slab");
    }
  }

  ExperimentReport rep;
  rep.name = "normal_order";
  rep.config = {{"n", cfg.n},
                {"height", H},
                {"beta", cfg.beta},
                {"alpha", cfg.alpha},
                {"density", "exp(beta (x1 - 1/2) + alpha (x1 - 1/2) x2)"},
                {"r_grid", cfg.r_grid},
                {"probe_depth", cfg.probe_depth},
                {"probe_halfwidth", cfg.probe_halfwidth},
                {"trials", cfg.trials},
                {"seed", cfg.seed}};
  rep.seeds = trial_seeds(cfg.seed, cfg.trials);
  rep.columns = {"r", "bias_first", "bias_second", "se_first", "se_second", "probes"};

  const std::size_t nr = cfg.r_grid.size();
  // per r: per-trial mean signed angle
  std::vector<std::vector<double>> a1(nr), a2(nr);
  std::size_t probes_total = 0;
  for (std::uint64_t s : rep.seeds) {
    Rng rng(s);
    std::vector<double> coords;
    coords.reserve(2 * cfg.n);
    while (coords.size() < 2 * cfg.n) {
      const double x1 = rng.uniform(), x2 = rng.uniform(0.0, H), u = rng.uniform();
      if (u * envelope < rho(x1, x2)) {
        coords.push_back(x1);
        coords.push_back(x2);
      }
    }
    const SpatialIndex index(PointCloud(2, std::move(coords)));
    const auto& cloud = index.cloud();
    std::vector<std::size_t> probes;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (cloud[i][1] < cfg.probe_depth && std::abs(cloud[i][0] - 0.5) < cfg.probe_halfwidth) probes.push_back(i);
    }
    if (probes.empty()) continue;
    probes_total += probes.size();
    std::vector<double> theta(cloud.size(), 0.0);
    for (std::size_t ri = 0; ri < nr; ++ri) {
      const double r = cfg.r_grid[ri];
      std::vector<std::uint8_t> need(cloud.size(), 0);
      for (std::size_t p : probes) {
        for (std::size_t j : index.range_of(p, r)) need[j] = 1;
      }
      std::vector<std::size_t> todo = indices_where(need);
      parallel_for(todo.size(), [&](std::size_t t) { theta[todo[t]] = theta_hat(index, todo[t], r); });
      std::vector<double> s1(probes.size()), s2(probes.size());
      parallel_for(probes.size(), [&](std::size_t q) {
        const auto n1 = first_order_normal(index, probes[q], r);
        const auto n2 = second_order_normal(index, probes[q], r, theta);
        s1[q] = n1.degenerate ? 0.0 : std::atan2(n1.nu[0], n1.nu[1]);
        s2[q] = n2.degenerate ? 0.0 : std::atan2(n2.nu[0], n2.nu[1]);
      });
      a1[ri].push_back(mean(s1));
      a2[ri].push_back(mean(s2));
    }
  }
  if (a1[0].empty()) throw Error("normal order sweep: no probe points; increase n or the probe band");
  std::vector<double> b1(nr), b2(nr);
  for (std::size_t ri = 0; ri < nr; ++ri) {
    b1[ri] = std::abs(mean(a1[ri]));
    b2[ri] = std::abs(mean(a2[ri]));
    const double sq = std::sqrt(static_cast<double>(a1[ri].size()));
    rep.add_row({cfg.r_grid[ri], b1[ri], b2[ri], stddev(a1[ri]) / sq, stddev(a2[ri]) / sq,
                 static_cast<std::int64_t>(probes_total)});
  }
  rep.fits.emplace_back("first", fit_loglog(cfg.r_grid, b1));
  rep.fits.emplace_back("second", fit_loglog(cfg.r_grid, b2));
  return rep;
}

ExperimentReport standardness_check(const Domain& domain, double r, double eps, std::size_t points,
                                    std::size_t samples, std::uint64_t seed) {
  ExperimentReport rep;
  rep.name = "standardness";
  const auto flags = assess_params(domain.dim(), r, eps, domain.reach());
  rep.config = {{"domain", to_json(domain)}, {"r", r},           {"eps", eps},
                {"points", points},          {"samples", samples}, {"seed", seed},
                {"A1", to_string(flags.a1)}, {"A2", to_string(flags.a2)}};
  rep.seeds = {seed};
  rep.columns = {"point", "d_true", "fraction"};
  const auto pts = near_boundary_points(domain, points, 2.0 * eps, seed);
  const GroundTruth truth(domain);
  double lowest = 1.0;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    const double f = ball_fraction_inside(domain, pts[p], r, samples, seed + 1 + p);
    lowest = std::min(lowest, f);
    rep.add_row({static_cast<std::int64_t>(p), truth.distance(pts[p]), f});
  }
  rep.summary = {{"min_fraction", lowest}, {"bound", 1.0 / 3.0}};
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport run_experiment(const json& j) {
  const std::string name = j.at("experiment").get<std::string>();
  const std::uint64_t seed = j.value("seed", std::uint64_t{0});
  auto domain = [&](const char* fallback) {
    return j.contains("domain") ? domain_from_json(j.at("domain")) : domain_from_json(json::parse(fallback));
  };
  auto density = [&]() { return j.contains("density") ? density_from_json(j.at("density")) : Density::uniform(); };

  if (name == "tfr_sweep") {
    TfrSweepConfig c;
    c.domain = domain(R"({"kind":"ball","dim":2,"radius":0.5})");
    c.density = density();
    c.n = j.value("n", c.n);
    c.eps = j.value("eps", c.eps);
    c.r_grid = j.value("r_grid", c.r_grid);
    if (j.contains("orders")) {
      c.orders.clear();
      for (const auto& o : j.at("orders")) c.orders.push_back(order_from(o.get<std::string>()));
    }
    c.true_normals = j.value("true_normals", c.true_normals);
    c.trials = j.value("trials", c.trials);
    c.seed = seed;
    return run_tfr_sweep(c);
  }
  if (name == "scaling_sweep") {
    ScalingConfig c;
    c.domain = domain(R"({"kind":"ball","dim":2,"radius":0.5})");
    c.density = j.contains("density") ? density_from_json(j.at("density")) : c.density;
    c.eps_grid = j.value("eps_grid", c.eps_grid);
    c.tfr_threshold = j.value("tfr_threshold", c.tfr_threshold);
    c.n_start = j.value("n_start", c.n_start);
    c.n_cap = j.value("n_cap", c.n_cap);
    c.trials = j.value("trials", c.trials);
    c.order = order_from(j.value("order", std::string("first")));
    c.seed = seed;
    return run_scaling_sweep(c);
  }
  if (name == "distance_scatter") {
    return run_distance_scatter(domain(R"({"kind":"ball","dim":2,"radius":0.5})"), density(),
                                j.value("n", std::size_t{4000}), j.value("eps", 0.03), j.value("r", 0.18), seed);
  }
  if (name == "eikonal_convergence") {
    EikonalConvergenceConfig c;
    c.domain = domain(R"({"kind":"box","sides":[1,1]})");
    c.n_grid = j.value("n_grid", c.n_grid);
    c.trials = j.value("trials", c.trials);
    c.seed = seed;
    return run_eikonal_convergence(c);
  }
  if (name == "robin_convergence" || name == "eigen_convergence") {
    SecondOrderConfig c;
    c.problem = name == "robin_convergence" ? SecondOrderProblem::robin : SecondOrderProblem::eigen;
    c.n_grid = j.value("n_grid", c.n_grid);
    c.trials = j.value("trials", c.trials);
    c.robin_gamma = j.value("robin_gamma", c.robin_gamma);
    c.seed = seed;
    return run_secondorder_convergence(c);
  }
  if (name == "population_bias") {
    const Domain d = domain(R"({"kind":"ball","dim":2,"radius":0.5})");
    const auto r_grid = j.value("r_grid", std::vector<double>{0.05, 0.1, 0.18});
    const auto pts = j.contains("points")
                         ? j.at("points").get<std::vector<std::vector<double>>>()
                         : near_boundary_points(d, j.value("count", std::size_t{20}), j.value("max_dist", 0.02), seed);
    return population_bias_check(d, density(), r_grid, pts);
  }
  if (name == "normal_order") {
    NormalOrderConfig c;
    c.n = j.value("n", c.n);
    c.height = j.value("height", c.height);
    c.beta = j.value("beta", c.beta);
    c.alpha = j.value("alpha", c.alpha);
    c.r_grid = j.value("r_grid", c.r_grid);
    c.probe_depth = j.value("probe_depth", c.probe_depth);
    c.probe_halfwidth = j.value("probe_halfwidth", c.probe_halfwidth);
    c.trials = j.value("trials", c.trials);
    c.seed = seed;
    return normal_order_sweep(c);
  }
  if (name == "standardness") {
    const Domain d = domain(R"({"kind":"ball","dim":2,"radius":0.5})");
    const double r = j.value("r", d.reach() / (3.0 * std::sqrt(static_cast<double>(d.dim()))));
    return standardness_check(d, r, j.value("eps", r * r / d.reach()), j.value("points", std::size_t{100}),
                              j.value("samples", std::size_t{20000}), seed);
  }
  throw Error("unknown experiment '" + name + "'");
}

}  // namespace pcb
