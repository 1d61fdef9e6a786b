#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "c2poly/common.hpp"
#include "c2poly/config.hpp"
#include "c2poly/cubature.hpp"
#include "c2poly/discretize.hpp"
#include "c2poly/experiments.hpp"
#include "c2poly/net.hpp"
#include "c2poly/parabola.hpp"
#include "c2poly/patch.hpp"
#include "c2poly/polynomial.hpp"

namespace py = pybind11;
using namespace c2poly;

namespace {

using Pt = std::pair<double, double>;

std::vector<Pt> to_pairs(const std::vector<Vec2>& v) {
  std::vector<Pt> out;
  out.reserve(v.size());
  for (const Vec2& x : v) out.emplace_back(x.x(), x.y());
  return out;
}

std::vector<Vec2> to_vecs(const std::vector<Pt>& v) {
  std::vector<Vec2> out;
  out.reserve(v.size());
  for (const auto& [x, y] : v) out.emplace_back(x, y);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  // library errors surface as ValueError / ArithmeticError with the key kept
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::object err = py::reinterpret_borrow<py::object>(config_error.ptr())(e.what());
      err.attr("key") = e.key();
      PyErr_SetObject(config_error.ptr(), err.ptr());
    }
  });

  m.def("version", &version_string);
  m.attr("CONFIG_SCHEMA") = kConfigSchema;

  py::class_<Polynomial>(m, "Polynomial")
      .def(py::init<int, int, std::vector<double>>(), py::arg("dim"), py::arg("degree"), py::arg("coeffs"))
      .def_static("random", &random_polynomial, py::arg("dim"), py::arg("degree"), py::arg("seed"))
      .def_property_readonly("dim", &Polynomial::dim)
      .def_property_readonly("degree", &Polynomial::degree)
      .def_property_readonly("coeffs", [](const Polynomial& p) { return p.coeffs(); })
      .def("__call__", [](const Polynomial& p, std::vector<double> x) {
        if (int(x.size()) != p.dim()) throw DomainError("point dimension does not match the polynomial");
        return p(std::span<const double>(x));
      });

  py::class_<Domain>(m, "Domain")
      .def_static("disk", [](double r, Pt c) { return Domain::disk(Vec2(c.first, c.second), r); }, py::arg("radius") = 1.0,
                  py::arg("center") = Pt{0.0, 0.0})
      .def_static("ellipse", [](double a, double b) { return Domain::ellipse(a, b); }, py::arg("a"), py::arg("b"))
      .def_static("from_json",
                  [](const std::string& s) { return domain_from_json(canonical_domain(nlohmann::json::parse(s))); })
      .def("contains", [](const Domain& d, Pt x) { return d.contains(Vec2(x.first, x.second)); })
      .def("dist", [](const Domain& d, Pt x) { return d.dist(Vec2(x.first, x.second)); })
      .def_property_readonly("area", &Domain::area);

  py::class_<Net>(m, "Net")
      .def_property_readonly("centers", [](const Net& n) { return to_pairs(n.centers); })
      .def_readonly("delta", &Net::delta)
      .def("__len__", &Net::size);
  m.def("greedy_maximal_net", &greedy_maximal_net, py::arg("domain"), py::arg("delta"), py::arg("candidates") = 200000,
        py::arg("seed") = 0);
  m.def("min_separation", [](const Domain& d, const Net& n) { return min_separation(d, n); });

  py::class_<Partition>(m, "Partition")
      .def_readonly("net", &Partition::net)
      .def_readonly("measures", &Partition::measures)
      .def_readonly("unassigned", &Partition::unassigned)
      .def("__len__", &Partition::size);
  m.def("make_partition", &make_partition, py::arg("domain"), py::arg("net"), py::arg("samples") = 200000,
        py::arg("seed") = 0);

  m.def(
      "mz_ratio_sweep",
      [](const Domain& d, int n, double p, const std::vector<double>& deltas, std::size_t trials, std::uint64_t seed,
         std::size_t candidates, std::size_t samples) {
        MZOptions o;
        o.candidates = candidates;
        o.measure_samples = samples;
        const MZSweep s = mz_ratio_sweep(d, n, p, deltas, trials, seed, o);
        py::list reports;
        for (const auto& r : s.reports) {
          py::dict x;
          x["delta"] = r.delta;
          x["nodes"] = r.nodes;
          x["min_ratio"] = r.min_ratio;
          x["max_ratio"] = r.max_ratio;
          x["in_band"] = r.in_band;
          reports.append(x);
        }
        py::dict out;
        out["reports"] = reports;
        out["delta0"] = s.delta0 ? py::object(py::float_(*s.delta0)) : py::object(py::none());
        return out;
      },
      py::arg("domain"), py::arg("n"), py::arg("p"), py::arg("deltas"), py::arg("trials") = 50, py::arg("seed") = 0,
      py::arg("candidates") = 200000, py::arg("samples") = 200000);

  py::class_<CubatureRule>(m, "CubatureRule")
      .def_property_readonly("nodes", [](const CubatureRule& r) { return to_pairs(r.nodes); })
      .def_readonly("weights", &CubatureRule::weights)
      .def_readonly("degree", &CubatureRule::degree)
      .def_readonly("residual", &CubatureRule::residual)
      .def_readonly("t_star", &CubatureRule::t_star)
      .def_readonly("method", &CubatureRule::method);
  m.def(
      "nnls_weights", [](const Domain& d, const std::vector<Pt>& nodes, int n) { return nnls_weights(d, to_vecs(nodes), n); },
      py::arg("domain"), py::arg("nodes"), py::arg("n"));
  m.def(
      "lp_maxmin_weights", [](const Domain& d, const Partition& part, int n) { return lp_maxmin_weights(d, part, n); },
      py::arg("domain"), py::arg("partition"), py::arg("n"));

  py::class_<GraphPatch>(m, "GraphPatch")
      .def_static("quadratic", &GraphPatch::quadratic, py::arg("c"), py::arg("c1"), py::arg("c2"), py::arg("b"),
                  py::arg("L"))
      .def_property_readonly("base", &GraphPatch::base)
      .def_property_readonly("L", &GraphPatch::L);
  m.def("decompose_boundary", [](const Domain& d, double base) { return decompose_boundary(d, base); },
        py::arg("domain"), py::arg("base") = 0.2);

  py::class_<ParabolaFamily>(m, "ParabolaFamily")
      .def(py::init([](const GraphPatch& g, double A, std::optional<double> M) { return ParabolaFamily(g, A, M); }),
           py::arg("patch"), py::arg("A"), py::arg("M") = py::none())
      .def_static("a_bar", &ParabolaFamily::a_bar, py::arg("patch"), py::arg("M"))
      .def_static("default_M", &ParabolaFamily::default_M, py::arg("patch"))
      .def_property_readonly("a", &ParabolaFamily::a)
      .def_property_readonly("a0", &ParabolaFamily::a0)
      .def("phi", [](const ParabolaFamily& f, double z, double t) {
        const Vec2 q = f.phi_map(z, t);
        return Pt{q.x(), q.y()};
      })
      .def("phi_inverse", [](const ParabolaFamily& f, double x, double y) { return f.phi_inverse(x, y); })
      .def("jacobian", &ParabolaFamily::jacobian_det);

  m.def("experiment_kinds", &experiment_kinds);
  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::string& out_dir) {
        ExperimentConfig cfg = parse_config(nlohmann::json::parse(config_json));
        cfg.out_dir = out_dir;
        const RunOutput r = run_experiment(cfg);
        return py::make_tuple(r.files, r.summary.dump());
      },
      py::arg("config_json"), py::arg("out_dir"));
}
