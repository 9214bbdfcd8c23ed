#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pcb/boundary.hpp"
#include "pcb/error.hpp"
#include "pcb/experiments.hpp"
#include "pcb/graph.hpp"
#include "pcb/normals.hpp"
#include "pcb/parallel.hpp"
#include "pcb/pde.hpp"
#include "pcb/pointcloud.hpp"
#include "pcb/spatial.hpp"

namespace {

using nlohmann::json;
using namespace pcb;

/// Raised for flag combinations CLI11 cannot express; exits with status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainFlags {
  std::string kind;
  std::size_t dim = 2;
  double radius = 0.5;
  double inner = 0.5;
  double outer = 0.8;
  std::string annulus_boundary = "inner";
  std::vector<double> sides{1.0, 1.0};

  void add(CLI::App* app, bool required) {
    auto* opt = app->add_option("--domain", kind, "Domain kind: ball, annulus or box")
                    ->check(CLI::IsMember({"ball", "annulus", "box"}));
    if (required) opt->required();
    app->add_option("--dim", dim, "Ambient dimension (count)")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--radius", radius, "Ball radius (length)")->capture_default_str();
    app->add_option("--inner", inner, "Annulus inner radius (length)")->capture_default_str();
    app->add_option("--outer", outer, "Annulus outer radius (length)")->capture_default_str();
    app->add_option("--annulus-boundary", annulus_boundary, "Annulus boundary measured: inner or both")
        ->capture_default_str()
        ->check(CLI::IsMember({"inner", "both"}));
    app->add_option("--sides", sides, "Box side lengths, one per dimension (length)")->capture_default_str();
  }

  std::optional<Domain> build() const {
    if (kind.empty()) return std::nullopt;
    if (kind == "ball") return Domain::ball(dim, radius);
    if (kind == "annulus") {
      return Domain::annulus(dim, inner, outer,
                             annulus_boundary == "both" ? AnnulusBoundary::both : AnnulusBoundary::inner);
    }
    if (sides.size() != dim) throw UsageError("--sides needs exactly --dim values");
    return Domain::box(sides);
  }
};

struct Output {
  std::string path;
  void add(CLI::App* app) { app->add_option("--out", path, "Output file (default: standard output)"); }

  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw Error("failed writing " + path);
  }
};

std::string fmt(double v) { return std::isfinite(v) ? format_double(v) : (v > 0 ? "inf" : "-inf"); }

/// Echoes the resolved config to stderr and returns it as a '#' header line.
std::string echo(const json& config) {
  std::cerr << "config: " << config.dump() << '\n';
  return "# " + config.dump() + "\n";
}

Order order_from(int order) {
  if (order == 1) return Order::first;
  if (order == 2) return Order::second;
  throw UsageError("--order must be 1 or 2");
}

/// Radius per point: the fixed --r, else the distance to the k-th neighbour.
Radii radii_from(const SpatialIndex& index, std::optional<double> r, std::size_t k) {
  if (r) return Radii(*r);
  if (k == 0 || k >= index.size()) throw Error("--k must lie in [1, n - 1]");
  std::vector<double> out(index.size());
  parallel_for(index.size(), [&](std::size_t i) { out[i] = index.kth_neighbor_distance(i, k); });
  return Radii(std::move(out));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.pop_back();
    std::size_t b = 0;
    while (b < tok.size() && std::isspace(static_cast<unsigned char>(tok[b]))) ++b;
    out.push_back(tok.substr(b));
  }
  return out;
}

bool numeric(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

/// Boundary indices from either a file of indices, an (index, label) table, or
/// a table with a header naming "index" and "label" columns.
std::vector<std::size_t> load_boundary(const std::string& path, std::size_t n) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  std::vector<std::size_t> out;
  std::optional<std::size_t> index_col, label_col;
  bool first = true;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (first) {
      first = false;
      if (!numeric(cells[0])) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
          if (cells[c] == "index") index_col = c;
          if (cells[c] == "label") label_col = c;
        }
        if (!index_col) throw ParseError("boundary file header has no 'index' column", lineno);
        continue;
      }
      index_col = 0;
      if (cells.size() >= 2) label_col = 1;
    }
    const std::size_t need = std::max(*index_col, label_col.value_or(0));
    if (cells.size() <= need) throw ParseError("too few columns in boundary file", lineno);
    if (!numeric(cells[*index_col])) throw ParseError("non-numeric index '" + cells[*index_col] + "'", lineno);
    const double idx = std::stod(cells[*index_col]);
    if (idx < 0 || idx != std::floor(idx) || idx >= static_cast<double>(n)) {
      throw ParseError("boundary index out of range: " + cells[*index_col], lineno);
    }
    if (label_col && std::stod(cells[*label_col]) == 0.0) continue;
    out.push_back(static_cast<std::size_t>(idx));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Kernel kernel_from(const std::string& name, std::size_t dim) {
  return name == "bump" ? Kernel::bump(dim) : Kernel::indicator(dim);
}

json domain_json(const std::optional<Domain>& d) { return d ? to_json(*d) : json(nullptr); }

// ---------------------------------------------------------------------------

struct SampleCmd {
  DomainFlags domain;
  std::string density = "uniform";
  double lipschitz = 2.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out;

  CLI::App* add(CLI::App& root) {
    auto* app = root.add_subcommand("sample", "Draw i.i.d. points from a density on a synthetic domain");
    domain.add(app, true);
    app->add_option("--density", density, "Density: uniform or sinusoidal")
        ->capture_default_str()
        ->check(CLI::IsMember({"uniform", "sinusoidal"}));
    app->add_option("--lipschitz", lipschitz, "Sinusoidal density Lipschitz constant L (1/length)")
        ->capture_default_str();
    app->add_option("--n", n, "Number of points (count)")->required()->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "Random seed (integer)")->capture_default_str();
    app->add_option("--out", out, "Output file; .pcb or .bin selects the binary format")->required();
    return app;
  }

  void run() const {
    const Domain d = *domain.build();
    const Density rho = density == "uniform" ? Density::uniform() : Density::sinusoidal(lipschitz);
    const json cfg = {{"command", "sample"}, {"domain", to_json(d)}, {"density", to_json(rho)},
                      {"n", n},              {"seed", seed},        {"out", out}};
    echo(cfg);
    const PointCloud cloud = sample(d, rho, n, seed);
    const std::string ext = std::filesystem::path(out).extension().string();
    if (ext == ".pcb" || ext == ".bin") {
      save_binary(cloud, out);
    } else {
      save_csv(cloud, out, cfg.dump());
    }
  }
};

struct RadiusFlags {
  std::optional<double> r;
  std::size_t k = 10;
  int order = 2;
  std::optional<double> smooth;

  void add(CLI::App* app) {
    app->add_option("--r", r, "Neighbourhood radius (length); default: distance to the k-th neighbour");
    app->add_option("--k", k, "Neighbour count used when --r is absent (count)")->capture_default_str();
    app->add_option("--order", order, "Estimator order: 1 or 2")->capture_default_str()->check(CLI::IsMember({1, 2}));
    app->add_option("--smooth", smooth, "Smooth normals over this radius before use (length)");
  }

  json to_json() const {
    json j = {{"k", k}, {"order", order}};
    j["r"] = r ? json(*r) : json(nullptr);
    j["smooth"] = smooth ? json(*smooth) : json(nullptr);
    return j;
  }

  std::vector<NormalEstimate> normals(const SpatialIndex& index, const Radii& radii) const {
    auto nu = estimate_normals(index, radii, order_from(order));
    if (smooth) nu = smooth_normals(index, nu, *smooth);
    return nu;
  }
};

struct BoundaryCmd {
  std::string in;
  RadiusFlags radius;
  std::optional<double> eps;
  std::optional<double> percentile;
  DomainFlags domain;
  Output out;

  CLI::App* add(CLI::App& root) {
    auto* app = root.add_subcommand("boundary", "Estimate distances to the boundary and label boundary points");
    app->add_option("--in", in, "Point cloud (CSV or binary)")->required()->check(CLI::ExistingFile);
    radius.add(app);
    auto* e = app->add_option("--eps", eps, "Boundary width: label iff d_hat < 3 eps / 2 (length)");
    auto* p = app->add_option("--percentile", percentile, "Label the lowest p percent of d_hat (percent)");
    e->excludes(p);
    domain.add(app, false);
    out.add(app);
    return app;
  }

  void run() const {
    if (!eps && !percentile) throw UsageError("boundary needs one of --eps or --percentile");
    const std::optional<Domain> d = domain.build();
    json cfg = {{"command", "boundary"}, {"in", in}, {"radius", radius.to_json()}, {"domain", domain_json(d)}};
    cfg["eps"] = eps ? json(*eps) : json(nullptr);
    cfg["percentile"] = percentile ? json(*percentile) : json(nullptr);
    std::string text = echo(cfg);

    const SpatialIndex index(load_points(in));
    const std::size_t n = index.size(), dim = index.dim();
    const Radii radii = radii_from(index, radius.r, radius.k);
    const auto normals = radius.normals(index, radii);
    const Order order = order_from(radius.order);
    const DistanceEstimate dist = estimate_distances(index, radii, order, NeighborPolicy::flag, normals);
    const BoundaryLabel labels = eps ? boundary_test(dist.d_hat, *eps) : boundary_percentile(dist.d_hat, *percentile);
    if (!dist.insufficient.empty()) {
      std::cerr << "warning: " << dist.insufficient.size() << " points had no neighbours within r\n";
    }
    std::vector<double> truth;
    if (d) truth = GroundTruth(*d).distances(index.cloud());

    text += "# threshold=" + fmt(labels.threshold) + " eps=" + fmt(labels.eps) + "\n";
    text += "index,d_hat,label,true_dist";
    for (std::size_t k = 0; k < dim; ++k) text += ",nu" + std::to_string(k);
    text += '\n';
    for (std::size_t i = 0; i < n; ++i) {
      text += std::to_string(i) + ',' + fmt(dist.d_hat[i]) + ',' + std::to_string(labels.label[i]) + ',';
      if (!truth.empty()) text += fmt(truth[i]);
      for (std::size_t k = 0; k < dim; ++k) text += ',' + fmt(normals[i].nu[k]);
      text += '\n';
    }
    out.write(text);
  }
};

struct NormalsCmd {
  std::string in;
  RadiusFlags radius;
  Output out;

  CLI::App* add(CLI::App& root) {
    auto* app = root.add_subcommand("normals", "Estimate inward unit normals");
    app->add_option("--in", in, "Point cloud (CSV or binary)")->required()->check(CLI::ExistingFile);
    radius.add(app);
    out.add(app);
    return app;
  }

  void run() const {
    const json cfg = {{"command", "normals"}, {"in", in}, {"radius", radius.to_json()}};
    std::string text = echo(cfg);
    const SpatialIndex index(load_points(in));
    const auto normals = radius.normals(index, radii_from(index, radius.r, radius.k));
    text += "index,magnitude";
    for (std::size_t k = 0; k < index.dim(); ++k) text += ",nu" + std::to_string(k);
    text += ",degenerate\n";
    for (std::size_t i = 0; i < normals.size(); ++i) {
      text += std::to_string(i) + ',' + fmt(normals[i].magnitude);
      for (double c : normals[i].nu) text += ',' + fmt(c);
      text += std::string(",") + (normals[i].degenerate ? "1" : "0") + '\n';
    }
    out.write(text);
  }
};

std::string solution_table(const std::vector<double>& u, const std::vector<double>& truth) {
  std::string text = "index,u,true,abs_error\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    text += std::to_string(i) + ',' + fmt(u[i]) + ',';
    if (!truth.empty()) text += fmt(truth[i]) + ',' + fmt(std::abs(u[i] - truth[i]));
    else text += ',';
    text += '\n';
  }
  return text;
}

struct EikonalCmd {
  std::string in, boundary;
  double eps = 0.0;
  DomainFlags domain;
  Output out;

  CLI::App* add(CLI::App& root) {
    auto* app = root.add_subcommand("eikonal", "Graph distance to a boundary set over the eps-graph");
    app->add_option("--in", in, "Point cloud (CSV or binary)")->required()->check(CLI::ExistingFile);
    app->add_option("--boundary", boundary, "Boundary set: index list or a labelled table")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--eps", eps, "Graph radius (length)")->required()->check(CLI::PositiveNumber);
    domain.add(app, false);
    out.add(app);
    return app;
  }

  void run() const {
    const std::optional<Domain> d = domain.build();
    const json cfg = {{"command", "eikonal"}, {"in", in}, {"boundary", boundary}, {"eps", eps}, {"domain", domain_json(d)}};
    std::string text = echo(cfg);
    const SpatialIndex index(load_points(in));
    const auto bset = load_boundary(boundary, index.size());
    const PdeSolution sol = solve_eikonal(index, eps, bset);
    if (sol.unreachable > 0) std::cerr << "warning: " << sol.unreachable << " points cannot reach the boundary\n";
    std::vector<double> truth;
    if (d) truth = GroundTruth(*d).distances(index.cloud());
    out.write(text + solution_table(sol.u, truth));
  }
};

struct PoissonCmd {
  std::string in, boundary;
  double eps = 0.0;
  double gamma = 0.5;
  double f = 0.0, g = 0.0;
  bool manufactured = false;
  double rho = 1.0 / std::numbers::pi;
  std::optional<double> r;
  std::string kernel = "indicator";
  Output out;

  CLI::App* add(CLI::App& root) {
    auto* app = root.add_subcommand("poisson", "Graph Poisson problem with Robin boundary rows");
    app->add_option("--in", in, "Point cloud (CSV or binary)")->required()->check(CLI::ExistingFile);
    app->add_option("--boundary", boundary, "Boundary set: index list or a labelled table")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--eps", eps, "Graph radius and normal-derivative step (length)")
        ->required()
        ->check(CLI::PositiveNumber);
    app->add_option("--gamma", gamma, "Robin weight in (0, 1]; 1 is Dirichlet")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--f", f, "Constant interior source")->capture_default_str();
    app->add_option("--g", g, "Constant boundary data")->capture_default_str();
    app->add_flag("--manufactured", manufactured,
                  "Use u = sin(2 x1^2) - cos(2 x1^2) on the unit disk for f, g and the error column");
    app->add_option("--rho", rho, "Density used by --manufactured (1/area)")->capture_default_str();
    app->add_option("--r", r, "Normal estimation radius (length); default eps");
    app->add_option("--kernel", kernel, "Kernel: indicator or bump")
        ->capture_default_str()
        ->check(CLI::IsMember({"indicator", "bump"}));
    out.add(app);
    return app;
  }

  void run() const {
    if (!(gamma > 0.0)) throw UsageError("--gamma must be positive");
    json cfg = {{"command", "poisson"}, {"in", in},  {"boundary", boundary},         {"eps", eps},
                {"gamma", gamma},       {"f", f},    {"g", g},                       {"manufactured", manufactured},
                {"rho", rho},           {"r", r ? *r : eps}, {"kernel", kernel}};
    std::string text = echo(cfg);
    const SpatialIndex index(load_points(in));
    const std::size_t n = index.size();
    if (manufactured && index.dim() != 2) throw UsageError("--manufactured needs a 2-D cloud");
    const Kernel k = kernel_from(kernel, index.dim());
    BoundaryConditions bc;
    bc.boundary = load_boundary(boundary, n);
    bc.robin_gamma = gamma;
    bc.f.assign(n, f);
    bc.g.assign(n, g);
    std::vector<double> truth;
    if (manufactured) {
      truth.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto x = index.cloud()[i];
        truth[i] = manufactured_solution(x);
        bc.f[i] = -rho * manufactured_laplacian(x);
        const auto grad = manufactured_gradient(x);
        const double rx = norm(x);
        const double dnu = rx > 0.0 ? -(grad[0] * x[0] + grad[1] * x[1]) / rx : 0.0;
        bc.g[i] = gamma * truth[i] - (1.0 - gamma) * dnu;
      }
    }
    if (gamma < 1.0) bc.normals = estimate_normals(index, Radii(r ? *r : eps), Order::second);
    const Graph graph = build_epsilon_graph(index, eps, k);
    const PdeSolution sol = solve_robin(index, graph, k, eps, bc);
    std::cerr << "residual: " << sol.residual << " iterations: " << sol.iterations << '\n';
    out.write(text + solution_table(sol.u, truth));
  }
};

struct EigenCmd {
  std::string in, boundary;
  std::optional<double> eps;
  std::optional<std::size_t> knn;
  std::string kernel = "indicator";
  bool reference = false;
  Output out;

  CLI::App* add(CLI::App& root) {
    auto* app = root.add_subcommand("eigen", "Principal Dirichlet eigenpair of the graph Laplacian");
    app->add_option("--in", in, "Point cloud (CSV or binary)")->required()->check(CLI::ExistingFile);
    app->add_option("--boundary", boundary, "Boundary set: index list or a labelled table")
        ->required()
        ->check(CLI::ExistingFile);
    auto* e = app->add_option("--eps", eps, "eps-graph radius, unnormalized Laplacian (length)");
    auto* k = app->add_option("--knn", knn, "Gaussian k-NN graph with symmetric normalization (count)");
    e->excludes(k);
    app->add_option("--kernel", kernel, "Kernel for --eps: indicator or bump")
        ->capture_default_str()
        ->check(CLI::IsMember({"indicator", "bump"}));
    app->add_flag("--reference", reference, "Compare with J0(j0 |x|), the unit-disk eigenfunction");
    out.add(app);
    return app;
  }

  void run() const {
    if (!eps && !knn) throw UsageError("eigen needs one of --eps or --knn");
    json cfg = {{"command", "eigen"}, {"in", in}, {"boundary", boundary}, {"kernel", kernel}, {"reference", reference}};
    cfg["eps"] = eps ? json(*eps) : json(nullptr);
    cfg["knn"] = knn ? json(*knn) : json(nullptr);
    std::string text = echo(cfg);
    const SpatialIndex index(load_points(in));
    const auto bset = load_boundary(boundary, index.size());
    const Kernel k = kernel_from(kernel, index.dim());
    const PdeSolution sol =
        eps ? solve_dirichlet_eigen(build_epsilon_graph(index, *eps, k), k, *eps, bset, Normalization::unnormalized)
            : solve_dirichlet_eigen(build_knn_gaussian_graph(index, *knn), k, 1.0, bset, Normalization::symmetric);
    std::vector<double> truth;
    if (reference) {
      truth.resize(index.size());
      for (std::size_t i = 0; i < index.size(); ++i) truth[i] = disk_eigenfunction(index.cloud()[i]);
    }
    text += "# lambda=" + fmt(*sol.lambda) + "\n";
    out.write(text + solution_table(sol.u, truth));
  }
};

struct DepthCmd {
  std::string in;
  std::size_t k = 10;
  double percentile = 10.0;
  std::string method = "eikonal";
  Output out;

  CLI::App* add(CLI::App& root) {
    auto* app = root.add_subcommand("depth", "Rank points by data depth (distance or eigenfunction)");
    app->add_option("--in", in, "Point cloud (CSV or binary)")->required()->check(CLI::ExistingFile);
    app->add_option("--k", k, "Neighbours for radii and the k-NN graph (count)")->capture_default_str();
    app->add_option("--percentile", percentile, "Boundary set: lowest p percent of d_hat (percent)")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 100.0));
    app->add_option("--method", method, "Depth: eikonal or eigen")
        ->capture_default_str()
        ->check(CLI::IsMember({"eikonal", "eigen"}));
    out.add(app);
    return app;
  }

  void run() const {
    const json cfg = {{"command", "depth"}, {"in", in}, {"k", k}, {"percentile", percentile}, {"method", method}};
    std::string text = echo(cfg);
    const DepthResult res =
        depth_rank(load_points(in), k, percentile, method == "eigen" ? DepthMethod::eigen : DepthMethod::eikonal);
    if (method == "eigen") text += "# lambda=" + fmt(res.lambda) + "\n";
    text += "rank,index,depth,d_hat,boundary\n";
    for (std::size_t r = 0; r < res.ranking.size(); ++r) {
      const std::size_t i = res.ranking[r];
      text += std::to_string(r) + ',' + std::to_string(i) + ',' + fmt(res.depth[i]) + ',' + fmt(res.d_hat[i]) + ',' +
              std::to_string(res.boundary[i]) + '\n';
    }
    out.write(text);
  }
};

struct ExperimentCmd {
  std::string config_path;
  std::string name;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  Output out;

  CLI::App* add(CLI::App& root) {
    auto* app = root.add_subcommand("experiment", "Run a named experiment and write its report CSV");
    auto* c = app->add_option("--config", config_path, "JSON config with an \"experiment\" field")
                  ->check(CLI::ExistingFile);
    auto* nm = app->add_option("--name", name,
                               "Experiment: tfr_sweep, scaling_sweep, distance_scatter, eikonal_convergence, "
                               "robin_convergence, eigen_convergence, population_bias, normal_order, standardness");
    (void)c;
    (void)nm;
    app->add_option("--trials", trials, "Override the trial count (count)");
    app->add_option("--seed", seed, "Override the base seed (integer)");
    out.add(app);
    return app;
  }

  void run() const {
    json cfg = json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      try {
        cfg = json::parse(f);
      } catch (const json::exception& e) {
        throw UsageError(std::string("cannot parse config: ") + e.what());
      }
    }
    if (!name.empty()) cfg["experiment"] = name;
    if (!cfg.contains("experiment")) throw UsageError("experiment needs --name or a config with \"experiment\"");
    if (trials) cfg["trials"] = *trials;
    if (seed) cfg["seed"] = *seed;
    echo(cfg);
    out.write(run_experiment(cfg).to_csv());
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary detection and graph PDE solvers for point clouds"};
  app.require_subcommand(1);
  std::optional<std::size_t> threads;
  app.add_option("--threads", threads, "Worker threads (count); PCB_THREADS is read when absent")
      ->check(CLI::PositiveNumber);

  SampleCmd sample_cmd;
  BoundaryCmd boundary_cmd;
  NormalsCmd normals_cmd;
  EikonalCmd eikonal_cmd;
  PoissonCmd poisson_cmd;
  EigenCmd eigen_cmd;
  DepthCmd depth_cmd;
  ExperimentCmd experiment_cmd;
  const std::vector<std::pair<CLI::App*, std::function<void()>>> commands{
      {sample_cmd.add(app), [&] { sample_cmd.run(); }},
      {boundary_cmd.add(app), [&] { boundary_cmd.run(); }},
      {normals_cmd.add(app), [&] { normals_cmd.run(); }},
      {eikonal_cmd.add(app), [&] { eikonal_cmd.run(); }},
      {poisson_cmd.add(app), [&] { poisson_cmd.run(); }},
      {eigen_cmd.add(app), [&] { eigen_cmd.run(); }},
      {depth_cmd.add(app), [&] { depth_cmd.run(); }},
      {experiment_cmd.add(app), [&] { experiment_cmd.run(); }},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (threads) set_thread_count(*threads);
    for (const auto& [sub, run] : commands) {
      if (sub->parsed()) run();
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
