#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "pcb/boundary.hpp"
#include "pcb/error.hpp"
#include "pcb/experiments.hpp"
#include "pcb/graph.hpp"
#include "pcb/normals.hpp"
#include "pcb/parallel.hpp"
#include "pcb/pde.hpp"
#include "pcb/pointcloud.hpp"
#include "pcb/report.hpp"
#include "pcb/spatial.hpp"

namespace py = pybind11;
using namespace pcb;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PointCloud to_cloud(const Array& points) {
  if (points.ndim() != 2) throw Error("points must be a 2-D array of shape (n, d)");
  const auto n = static_cast<std::size_t>(points.shape(0));
  const auto d = static_cast<std::size_t>(points.shape(1));
  return PointCloud(d, std::vector<double>(points.data(), points.data() + n * d));
}

Array to_array(const PointCloud& cloud) {
  Array out({cloud.size(), cloud.dim()});
  std::copy(cloud.coords().begin(), cloud.coords().end(), out.mutable_data());
  return out;
}

py::array_t<double> vec(const std::vector<double>& v) {
  return py::array_t<double>(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())}, v.data());
}

Order order_of(int order) {
  if (order == 1) return Order::first;
  if (order == 2) return Order::second;
  throw Error("order must be 1 or 2");
}

Radii radii_of(const py::object& r) {
  if (py::isinstance<py::float_>(r) || py::isinstance<py::int_>(r)) return Radii(r.cast<double>());
  return Radii(r.cast<std::vector<double>>());
}

Domain make_domain(const std::string& kind, std::size_t dim, double radius, double inner, double outer,
                   const std::vector<double>& sides, const std::string& annulus_boundary) {
  if (kind == "ball") return Domain::ball(dim, radius);
  if (kind == "annulus") {
    return Domain::annulus(dim, inner, outer,
                           annulus_boundary == "both" ? AnnulusBoundary::both : AnnulusBoundary::inner);
  }
  if (kind == "box") return Domain::box(sides.empty() ? std::vector<double>(dim, 1.0) : sides);
  throw Error("unknown domain kind '" + kind + "'");
}

Density make_density(const std::string& kind, double lipschitz) {
  if (kind == "uniform") return Density::uniform();
  if (kind == "sinusoidal") return Density::sinusoidal(lipschitz);
  throw Error("unknown density '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(pcboundary, m) {
  m.doc() = "Boundary detection, normal estimation and graph PDE solvers for point clouds";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "PcbError", PyExc_RuntimeError);

  py::class_<Domain>(m, "Domain")
      .def(py::init(&make_domain), py::arg("kind"), py::arg("dim") = 2, py::arg("radius") = 0.5,
           py::arg("inner") = 0.5, py::arg("outer") = 0.8, py::arg("sides") = std::vector<double>{},
           py::arg("annulus_boundary") = "inner")
      .def_property_readonly("dim", &Domain::dim)
      .def("reach", &Domain::reach)
      .def("volume", &Domain::volume)
      .def("contains", [](const Domain& d, const std::vector<double>& x) { return d.contains(x); })
      .def("__repr__", &Domain::describe);

  py::class_<Density>(m, "Density")
      .def(py::init(&make_density), py::arg("kind") = "uniform", py::arg("lipschitz") = 2.0)
      .def("__repr__", &Density::describe);

  m.def(
      "sample",
      [](const Domain& d, const Density& rho, std::size_t n, std::uint64_t seed) {
        return to_array(sample(d, rho, n, seed));
      },
      py::arg("domain"), py::arg("density"), py::arg("n"), py::arg("seed") = 0,
      "i.i.d. points of shape (n, d), deterministic in seed");

  m.def(
      "true_distance",
      [](const Domain& d, const Array& points) { return vec(GroundTruth(d).distances(to_cloud(points))); },
      py::arg("domain"), py::arg("points"));

  m.def(
      "kth_neighbor_distance",
      [](const Array& points, std::size_t k) {
        const SpatialIndex index(to_cloud(points));
        std::vector<double> out(index.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = index.kth_neighbor_distance(i, k);
        return vec(out);
      },
      py::arg("points"), py::arg("k"));

  m.def(
      "estimate_normals",
      [](const Array& points, const py::object& r, int order) {
        const SpatialIndex index(to_cloud(points));
        const auto normals = estimate_normals(index, radii_of(r), order_of(order));
        const std::size_t n = index.size(), d = index.dim();
        Array nu({n, d});
        std::vector<double> mag(n);
        std::vector<bool> degenerate(n);
        for (std::size_t i = 0; i < n; ++i) {
          std::copy(normals[i].nu.begin(), normals[i].nu.end(), nu.mutable_data() + i * d);
          mag[i] = normals[i].magnitude;
          degenerate[i] = normals[i].degenerate;
        }
        return py::make_tuple(nu, vec(mag), py::array(py::cast(degenerate)));
      },
      py::arg("points"), py::arg("r"), py::arg("order") = 2,
      "(unit normals (n, d), magnitudes |v|, degenerate flags); r is a float or one radius per point");

  m.def(
      "estimate_distances",
      [](const Array& points, const py::object& r, int order) {
        const SpatialIndex index(to_cloud(points));
        return vec(estimate_distances(index, radii_of(r), order_of(order), NeighborPolicy::flag).d_hat);
      },
      py::arg("points"), py::arg("r"), py::arg("order") = 2,
      "Estimated distance to the boundary; points without neighbours get d_hat = r");

  m.def(
      "boundary_test",
      [](const std::vector<double>& d_hat, double eps) {
        auto lab = boundary_test(d_hat, eps);
        return py::array(py::cast(std::vector<bool>(lab.label.begin(), lab.label.end())));
      },
      py::arg("d_hat"), py::arg("eps"), "True where d_hat < 3 eps / 2");

  m.def(
      "boundary_percentile",
      [](const std::vector<double>& d_hat, double percent) {
        auto lab = boundary_percentile(d_hat, percent);
        return py::make_tuple(py::array(py::cast(std::vector<bool>(lab.label.begin(), lab.label.end()))), lab.eps);
      },
      py::arg("d_hat"), py::arg("percent"), "(labels, implied eps) for the lowest percent of d_hat");

  m.def(
      "solve_eikonal",
      [](const Array& points, double eps, std::vector<std::size_t> boundary) {
        const SpatialIndex index(to_cloud(points));
        return vec(solve_eikonal(index, eps, boundary).u);
      },
      py::arg("points"), py::arg("eps"), py::arg("boundary"), "Graph distance to the boundary set; inf if unreachable");

  m.def(
      "solve_robin",
      [](const Array& points, double eps, std::vector<std::size_t> boundary, std::vector<double> f,
         std::vector<double> g, double gamma, std::optional<double> normal_radius) {
        const SpatialIndex index(to_cloud(points));
        const Kernel kernel = Kernel::indicator(index.dim());
        BoundaryConditions bc;
        bc.boundary = std::move(boundary);
        bc.robin_gamma = gamma;
        bc.f = std::move(f);
        bc.g = std::move(g);
        if (bc.f.size() != index.size() || bc.g.size() != index.size()) throw Error("f and g need one value per point");
        if (gamma < 1.0) bc.normals = estimate_normals(index, Radii(normal_radius.value_or(eps)), Order::second);
        const Graph graph = build_epsilon_graph(index, eps, kernel);
        return vec(solve_robin(index, graph, kernel, eps, bc).u);
      },
      py::arg("points"), py::arg("eps"), py::arg("boundary"), py::arg("f"), py::arg("g"), py::arg("gamma") = 0.5,
      py::arg("normal_radius") = py::none(),
      "Interior rows -L u = f, boundary rows gamma u - (1 - gamma) d_nu u = g on the indicator eps-graph");

  m.def(
      "solve_dirichlet_eigen",
      [](const Array& points, double eps, std::vector<std::size_t> boundary) {
        const SpatialIndex index(to_cloud(points));
        const Kernel kernel = Kernel::indicator(index.dim());
        const auto sol = solve_dirichlet_eigen(build_epsilon_graph(index, eps, kernel), kernel, eps, boundary,
                                               Normalization::unnormalized);
        return py::make_tuple(*sol.lambda, vec(sol.u));
      },
      py::arg("points"), py::arg("eps"), py::arg("boundary"), "(lambda, u) with u >= 0 and max u = 1");

  m.def(
      "depth_rank",
      [](const Array& points, std::size_t k, double percent, const std::string& method) {
        const auto res = depth_rank(to_cloud(points), k, percent,
                                    method == "eigen" ? DepthMethod::eigen : DepthMethod::eikonal);
        return py::make_tuple(res.ranking, vec(res.depth));
      },
      py::arg("points"), py::arg("k") = 10, py::arg("percent") = 10.0, py::arg("method") = "eikonal",
      "(indices by decreasing depth, depth per point)");

  m.def(
      "fit_loglog",
      [](const std::vector<double>& xs, const std::vector<double>& ys) {
        const auto f = fit_loglog(xs, ys);
        return py::make_tuple(f.slope, f.intercept, f.r2);
      },
      py::arg("xs"), py::arg("ys"), "(slope, intercept, r2) of log y against log x");

  m.def(
      "run_experiment",
      [](const std::string& config) {
        const ExperimentReport rep = [&] {
          py::gil_scoped_release release;
          return run_experiment(nlohmann::json::parse(config));
        }();
        return rep.to_csv();
      },
      py::arg("config"), "Runs an experiment from a JSON config string and returns the report CSV");

  m.def("set_thread_count", &set_thread_count, py::arg("n"));
  m.def("thread_count", &thread_count);
}
