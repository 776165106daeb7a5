#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cadshrink/equiv.hpp"
#include "cadshrink/eval.hpp"
#include "cadshrink/pipeline.hpp"
#include "cadshrink/syntax.hpp"

namespace py = pybind11;
using namespace cadshrink;

namespace {

py::tuple shrink_text(const std::string& text, int max_iters, std::size_t max_nodes, double max_seconds,
                      double solver_eps, double equiv_eps, bool cad_identities, bool inverse) {
  Config cfg;
  cfg.limits.max_iters = max_iters;
  cfg.limits.max_nodes = max_nodes;
  cfg.limits.max_seconds = max_seconds;
  cfg.solver_eps = solver_eps;
  cfg.equiv_eps = equiv_eps;
  cfg.groups.cad_identities = cad_identities;
  cfg.groups.inverse = inverse;
  Expr input = parse(text);
  ShrinkResult res;
  {
    py::gil_scoped_release release;
    res = shrink(input, cfg);
  }
  return py::make_tuple(print(res.output), to_json(res.report).dump());
}

py::object cost_of(const std::string& text) {
  Cost c = cost(parse(text));
  if (c == kInfiniteCost) return py::float_(std::numeric_limits<double>::infinity());
  return py::int_(c);
}

}  // namespace

PYBIND11_MODULE(_cadshrink, m) {
  m.doc() = "Shrink flat CSG into structured Caddy programs";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<EvalError>(m, "EvalError", PyExc_ValueError);
  py::register_exception<DegenerateScale>(m, "DegenerateScale", PyExc_ArithmeticError);

  m.def("normalize", [](const std::string& text) { return print(parse(text)); }, py::arg("text"),
        "Parse and print back in canonical form.");
  m.def("evaluate", [](const std::string& text) { return print(eval_to_core(parse(text))); }, py::arg("text"),
        "Unroll a Caddy program to Core Caddy.");
  m.def("cost", &cost_of, py::arg("text"));
  m.def("is_core", [](const std::string& text) { return is_core(parse(text)); }, py::arg("text"));
  m.def("semantic_equiv",
        [](const std::string& a, const std::string& b, double eps) { return semantic_equiv(parse(a), parse(b), eps); },
        py::arg("a"), py::arg("b"), py::arg("eps") = 1e-6);
  m.def("validate",
        [](const std::string& input, const std::string& output, double eps) {
          return validate(parse(input), parse(output), eps);
        },
        py::arg("input"), py::arg("output"), py::arg("eps") = 1e-6);
  m.def("perturb",
        [](const std::string& text, std::uint64_t seed, bool substitute_identities, bool drop_identities,
           bool interchange, bool shuffle_ac, double jitter) {
          PerturbOptions o{substitute_identities, drop_identities, interchange, shuffle_ac, jitter};
          return print(perturb(parse(text), seed, o));
        },
        py::arg("text"), py::arg("seed"), py::arg("substitute_identities") = true, py::arg("drop_identities") = true,
        py::arg("interchange") = true, py::arg("shuffle_ac") = true, py::arg("jitter") = 0.0);
  m.def("_shrink", &shrink_text, py::arg("text"), py::arg("max_iters") = 30, py::arg("max_nodes") = 100000,
        py::arg("max_seconds") = 10.0, py::arg("solver_eps") = 1e-3, py::arg("equiv_eps") = 1e-6,
        py::arg("cad_identities") = true, py::arg("inverse") = true);
}
