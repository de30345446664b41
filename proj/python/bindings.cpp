#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracwell/config.hpp"
#include "fracwell/version.hpp"

namespace py = pybind11;
using namespace fracwell;

namespace {

Functional make_functional(int d, int n, int m, double s, double theta, double c0, double delta0, double exterior,
                           std::uint64_t seed, const std::string& dist) {
  Model model;
  model.s = s;
  model.theta = theta;
  model.potential = Potential::build(c0, delta0);
  const Grid grid = Grid::make(d, n, m);
  const Disorder g = Disorder::sample(SiteBox::covering(grid), DisorderDistribution::from_name(dist), seed);
  return Functional(grid, model, g, Exterior::constant(exterior));
}

py::dict breakdown_dict(const EnergyBreakdown& e) {
  py::dict out;
  out["gagliardo"] = e.gagliardo;
  out["potential"] = e.potential;
  out["disorder"] = e.disorder;
  out["exterior"] = e.exterior;
  out["total"] = e.total;
  return out;
}

py::dict result_dict(const MinimizeResult& r) {
  py::dict out;
  out["values"] = r.values;
  out["energy"] = breakdown_dict(r.energy);
  out["residual"] = r.residual;
  out["iterations"] = r.iterations;
  out["converged"] = r.converged;
  return out;
}

py::dict table_dict(const Table& t) {
  py::dict out;
  for (const auto& c : t.columns) out[py::str(c)] = t.column(c);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Disordered fractional Allen-Cahn lattice energies and extremal states";
  m.attr("__version__") = kVersion;

  py::class_<Potential>(m, "Potential")
      .def(py::init([](double c0, double delta0) { return Potential::build(c0, delta0); }), py::arg("c0") = 1.0,
           py::arg("delta0") = 0.5)
      .def("value", &Potential::value)
      .def("slope", &Potential::slope)
      .def("curvature", &Potential::curvature);

  m.def("grid_points", [](int d, int n, int m) {
    const Grid g = Grid::make(d, n, m);
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Point p = g.point(i);
      pts.push_back(d == 1 ? std::vector<double>{p[0]} : std::vector<double>{p[0], p[1]});
    }
    return pts;
  }, py::arg("d"), py::arg("n"), py::arg("m") = 1);

  m.def("exterior_weights", [](int d, int n, int m, double s) { return exterior_weights(Grid::make(d, n, m), s); },
        py::arg("d"), py::arg("n"), py::arg("m"), py::arg("s"));

  py::class_<Functional>(m, "Functional")
      .def(py::init(&make_functional), py::arg("d"), py::arg("n"), py::arg("m") = 1, py::arg("s") = 0.75,
           py::arg("theta") = 1.0, py::arg("c0") = 1.0, py::arg("delta0") = 0.5, py::arg("exterior") = 0.0,
           py::arg("seed") = 0, py::arg("dist") = "uniform")
      .def_property_readonly("size", [](const Functional& f) { return f.domain().size(); })
      .def("energy", [](const Functional& f, const std::vector<double>& v) { return breakdown_dict(f.breakdown(v)); })
      .def("gradient", [](const Functional& f, const std::vector<double>& v) { return f.gradient(v); })
      .def("residual", [](const Functional& f, const std::vector<double>& v) { return f.residual(v); })
      .def("minimize",
           [](const Functional& f, const std::string& initial, double tolerance, int max_iter) {
             SolverConfig cfg;
             cfg.initial = initial_policy_from_name(initial);
             cfg.tolerance = tolerance;
             cfg.max_iter = max_iter;
             py::gil_scoped_release release;
             auto r = minimize(f, cfg);
             py::gil_scoped_acquire acquire;
             return result_dict(r);
           },
           py::arg("initial") = "plus_k", py::arg("tolerance") = 1e-9, py::arg("max_iter") = 50000)
      .def("extremal_pair", [](const Functional& f, double k) {
        ExtremalStates e;
        {
          py::gil_scoped_release release;
          e = extremal_pair(k, f, SolverConfig{});
        }
        py::dict out;
        out["plus"] = result_dict(e.plus);
        out["minus"] = result_dict(e.minus);
        out["ordering_violation"] = e.ordering_violation;
        return out;
      }, py::arg("k"));

  m.def("run_experiment", [](const std::map<std::string, std::string>& kv) {
    const RunConfig cfg = parse_config(kv, {});
    SweepRecord rec;
    {
      py::gil_scoped_release release;
      rec = run_experiment(cfg);
    }
    py::dict out;
    out["stem"] = output_stem(cfg);
    out["realizations"] = table_dict(rec.realizations);
    out["aggregates"] = table_dict(rec.aggregates);
    out["checks"] = rec.checks;
    out["solves"] = rec.solves;
    out["failures"] = rec.failures;
    return out;
  }, py::arg("config"));

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
}
