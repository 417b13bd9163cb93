#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hypererg/bms.hpp"
#include "hypererg/ergodic.hpp"
#include "hypererg/errors.hpp"
#include "hypererg/harness.hpp"
#include "hypererg/patterson_sullivan.hpp"

namespace py = pybind11;
using namespace hypererg;

namespace {

std::vector<Word> parse_words(const Alphabet& A, const std::vector<std::string>& ws) {
  std::vector<Word> out;
  for (const auto& w : ws) out.push_back(A.parse(w));
  return out;
}

}  // namespace

PYBIND11_MODULE(_hypererg, m) {
  m.doc() = "Free-group hyperbolic dynamics core";
  m.attr("__version__") = HYPERERG_VERSION;

  auto base = py::register_exception<Error>(m, "HyperergError", PyExc_RuntimeError);
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
  py::register_exception<BoundednessViolation>(m, "BoundednessViolation", base.ptr());
  py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());
  py::register_exception<AssertionFailure>(m, "AssertionFailure", base.ptr());

  m.def("reduce", [](int rank, const std::string& w) { Alphabet A(rank); return A.format(A.parse(w)); });
  m.def("multiply", [](int rank, const std::string& g, const std::string& h) {
    Alphabet A(rank);
    return A.format(mul(A.parse(g), A.parse(h)));
  });
  m.def("inverse", [](int rank, const std::string& g) { Alphabet A(rank); return A.format(inverse(A.parse(g))); });

  py::class_<Metric>(m, "Metric")
      .def_static("word", &Metric::word, py::arg("rank") = 2)
      .def_static("weighted", &Metric::weighted, py::arg("rank"), py::arg("weights"))
      .def_static("green", &Metric::green, py::arg("rank"), py::arg("probs"), py::arg("tol") = 1e-12)
      .def_static("alt_generators",
                  [](int rank, const std::vector<std::string>& gens) {
                    Alphabet A(rank);
                    return Metric::alt_generators(A, parse_words(A, gens));
                  })
      .def_property_readonly("rank", &Metric::rank)
      .def("length", [](const Metric& mt, const std::string& g) { return mt.length(mt.alphabet().parse(g)); })
      .def("__repr__", &Metric::describe);

  m.def("ball_size", [](const Metric& mt, double R) { return enumerate_ball(mt, R).elements.size(); });
  m.def(
      "growth_exponent",
      [](const Metric& mt, double R_max) {
        const auto e = growth_exponent(mt, R_max);
        return py::dict(py::arg("delta") = e.delta, py::arg("band") = e.band, py::arg("ball_size") = e.ball_size);
      },
      py::arg("metric"), py::arg("R_max"));
  m.def("perron_exponent", &perron_exponent);

  py::class_<PSMeasure>(m, "PSMeasure")
      .def_property_readonly("delta", &PSMeasure::delta)
      .def_property_readonly("resolution", &PSMeasure::resolution)
      .def("mass",
           [](const PSMeasure& ps, const std::string& w) { return ps.mass(Alphabet(ps.rank()).parse(w)); })
      .def("to_json", [](const PSMeasure& ps) { return ps.to_json(Alphabet(ps.rank())); })
      .def_static("from_json", &PSMeasure::from_json);

  m.def(
      "ps_measure",
      [](const Metric& mt, std::size_t resolution, const std::string& method, double R) {
        PSOptions o;
        o.method = method == "weakstar" ? PSMethod::WeakStar : PSMethod::ExactMarkov;
        o.R = R;
        return ps_cylinder_masses(mt, resolution, o);
      },
      py::arg("metric"), py::arg("resolution") = 3, py::arg("method") = "markov", py::arg("R") = 12.0);

  m.def("rn_log_gap", [](const PSMeasure& ps, const Metric& mt, const std::string& g, const std::string& c) {
    const Alphabet& A = mt.alphabet();
    return rn_derivative_check(ps, mt, A.parse(g), Cylinder(A.parse(c))).log_gap;
  });
  m.def("bms_invariance_defect", &bms_invariance_defect, py::arg("metric"), py::arg("ps"), py::arg("c_F") = 2.0,
        py::arg("resolution") = 3, py::arg("max_len") = 3);
  m.def(
      "cobound_phi",
      [](const Metric& mt, const PSMeasure& ps, double c_F, std::size_t res, std::size_t bound) {
        return cobound_phi(mt, ps, c_F, res, bound).sup_by_bound;
      },
      py::arg("metric"), py::arg("ps"), py::arg("c_F"), py::arg("pair_resolution") = 3, py::arg("word_bound") = 3);
  m.def("fundamental_domain_mass", [](const Metric& mt, const PSMeasure& ps) {
    BMSMeasure b;
    b.ps = ps;
    const auto r = fundamental_domain_mass(b, mt);
    return py::make_tuple(r.raw_mass, r.scale);
  });

  m.def(
      "ergodic_average",
      [](const Metric& mt, const PSMeasure& ps, double K, const std::string& xi, const std::string& eta,
         const std::string& variant, const std::vector<double>& T, std::size_t depth) {
        BMSMeasure b;
        b.ps = ps;
        b = normalize(b, mt);
        const Alphabet& A = mt.alphabet();
        const auto r = ergodic_average(mt, b, PairStepFunction::product_at_most(mt, K), BoundaryPoint::parse(A, xi),
                                       BoundaryPoint::parse(A, eta), parse_variant(variant), T, depth);
        return py::make_tuple(r.values, r.target);
      },
      py::arg("metric"), py::arg("ps"), py::arg("K"), py::arg("xi"), py::arg("eta"), py::arg("variant") = "tau",
      py::arg("T") = std::vector<double>{12.0}, py::arg("depth") = 24);

  m.def("slice_masses", [](const Metric& mt, const PSMeasure& ps, const std::string& x_plus, int n) {
    std::vector<double> out;
    for (const auto& r : slice_partition(mt, ps, BoundaryPoint::parse(mt.alphabet(), x_plus), n).rows)
      out.push_back(r.mass);
    return out;
  });
  m.def(
      "sat_search",
      [](const PSMeasure& ps, const std::vector<std::string>& A, double eps, std::size_t bound) -> py::object {
        const Alphabet alpha(ps.rank());
        const auto r = sat_search(ps, parse_words(alpha, A), eps, bound);
        if (!r.found) return py::none();
        return py::make_tuple(alpha.format(r.g), r.mass);
      },
      py::arg("ps"), py::arg("A"), py::arg("epsilon"), py::arg("candidate_bound") = 6);

  m.def(
      "run",
      [](const std::string& sub, const std::string& config, std::optional<std::uint64_t> seed, const std::string& out) {
        RunResult r;
        {
          py::gil_scoped_release release;
          r = hypererg::run(sub, config, seed, out);
        }
        return py::make_tuple(r.exit_code, r.message, r.outputs);
      },
      py::arg("subcommand"), py::arg("config"), py::arg("seed") = py::none(), py::arg("out") = ".");
}
