#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nmq/analysis.hpp"
#include "nmq/errors.hpp"
#include "nmq/io.hpp"
#include "nmq/model.hpp"
#include "nmq/realizability.hpp"
#include "nmq/reduction.hpp"

namespace py = pybind11;
using namespace nmq;

namespace {

InputAlignment alignment_of(const std::string& s) {
  if (s == "zero-pad") return InputAlignment::ZeroPad;
  if (s == "truncate") return InputAlignment::Truncate;
  throw py::value_error("alignment must be 'zero-pad' or 'truncate'");
}

py::dict report_dict(const RealizabilityReport& r) {
  py::dict conditions;
  for (const auto& c : r.conditions) conditions[py::str(c.name)] = py::make_tuple(c.residual, c.pass);
  py::dict out;
  out["pass"] = r.pass;
  out["tol"] = r.tol;
  out["conditions"] = conditions;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Realizable H2 reduction of ancillary oscillator models";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<NotHurwitzError>(m, "NotHurwitzError", PyExc_ArithmeticError);

  py::class_<QuadratureModel>(m, "Model")
      .def_readonly("A", &QuadratureModel::A)
      .def_readonly("B", &QuadratureModel::B)
      .def_readonly("C", &QuadratureModel::C)
      .def_readonly("D", &QuadratureModel::D)
      .def_readonly("m", &QuadratureModel::m)
      .def_readonly("n", &QuadratureModel::k)
      .def_readonly("m_out", &QuadratureModel::m_out)
      .def_readonly("n_in", &QuadratureModel::n_in)
      .def_readonly("source", &QuadratureModel::source)
      .def_property_readonly("states", &QuadratureModel::states)
      .def("to_json", [](const QuadratureModel& q) { return io::dump(io::model_to_json(q)); })
      .def_static("from_json", [](const std::string& text) {
        return io::model_from_json(io::parse(text, "<string>"));
      })
      .def("__repr__", [](const QuadratureModel& q) {
        return "<Model m=" + std::to_string(q.m) + " n=" + std::to_string(q.k) +
               " states=" + std::to_string(q.states()) + ">";
      });

  m.def("example", &build_example, "Worked two-principal, three-ancillary example");
  m.def("reduced_example", &reduced_example, "Transcribed one-mode reduction of the example");
  m.def("build", [](const std::string& params_json, const std::string& sign) {
    return to_quadrature(build_complex(io::params_from_json(io::parse(params_json, "<string>"))),
                         input_sign_from_string(sign));
  }, py::arg("params_json"), py::arg("sign") = "positive");

  m.def("check", [](const QuadratureModel& q, double tol) { return report_dict(check_quadrature(q, tol)); },
        py::arg("model"), py::arg("tol") = kRealizabilityTol);

  m.def("h2_distance", [](const QuadratureModel& a, const QuadratureModel& b, const std::string& align) {
    const H2Result h = h2_norm_sq(build_error_system(a, b, alignment_of(align)));
    py::dict out;
    out["h2"] = h.norm();
    out["ctrl_trace"] = h.ctrl_trace;
    out["obs_trace"] = h.obs_trace;
    out["relative_gap"] = h.relative_gap();
    return out;
  }, py::arg("original"), py::arg("reduced"), py::arg("alignment") = "zero-pad");

  m.def("reduce", [](const QuadratureModel& q, Index r, const std::string& method, std::uint64_t seed) {
    ReductionSpec spec;
    spec.r = r;
    spec.method = method_from_string(method);
    spec.seed = seed;
    ReductionResult res;
    {
      py::gil_scoped_release release;
      res = reduce(q, spec);
    }
    py::dict out;
    out["model"] = res.reduced;
    out["h2"] = res.h2_error;
    out["h2_squared"] = res.h2_squared;
    out["realizable"] = res.realizability.pass;
    out["selected_seed"] = res.diagnostics.selected_seed;
    out["iterations"] = res.diagnostics.iterations;
    return out;
  }, py::arg("model"), py::arg("r"), py::arg("method") = "gradient", py::arg("seed") = 7);
}
