#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dcpx/cli.hpp"
#include "dcpx/dcpx.hpp"

namespace py = pybind11;
using namespace dcpx;

namespace {

// Parameter values arrive as {Parameter: value}; iterate rather than look up,
// since Expr.__eq__ builds a constraint.
ParamBinding to_binding(const py::dict& params) {
  ParamBinding b;
  for (auto item : params) {
    const Expr p = item.first.cast<Expr>();
    if (py::isinstance<py::float_>(item.second) || py::isinstance<py::int_>(item.second)) {
      b.set(p, item.second.cast<double>());
    } else {
      b.set(p, item.second.cast<Eigen::VectorXd>());
    }
  }
  return b;
}

SolverSettings to_settings(std::optional<double> tol, std::optional<int> max_iters) {
  SolverSettings s;
  if (tol) s.eps_primal = s.eps_dual = s.eps_gap = *tol;
  if (max_iters) s.max_iters = *max_iters;
  return s;
}

Sign to_sign(const std::string& s) {
  if (s == "unknown") return Sign::Unknown;
  if (s == "nonneg") return Sign::Nonneg;
  if (s == "nonpos") return Sign::Nonpos;
  if (s == "zero") return Sign::Zero;
  throw Error(ErrorCode::ContractViolation, "sign must be unknown, nonneg, nonpos or zero");
}

}  // namespace

PYBIND11_MODULE(_dcpx, m) {
  m.doc() = "Disciplined convex programming: modeling, analysis and a conic solver";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<Expr> expr(m, "Expr");
  // Lets numpy arrays defer to Expr for `A @ x`.
  expr.attr("__array_ufunc__") = py::none();
  expr
      .def_property_readonly("shape", [](const Expr& e) { return py::make_tuple(e.shape().rows(), e.shape().cols()); })
      .def_property_readonly("name", &Expr::name)
      .def_property_readonly("size", &Expr::size)
      .def("__repr__", [](const Expr& e) { return to_string(e); })
      .def("__hash__", [](const Expr& e) { return e.node_id(); })
      .def("__getitem__", [](const Expr& e, int i) { return index(e, i); })
      .def("__neg__", [](const Expr& a) { return -a; })
      .def("__add__", [](const Expr& a, const Expr& b) { return a + b; })
      .def("__add__", [](const Expr& a, double b) { return a + b; })
      .def("__radd__", [](const Expr& a, double b) { return b + a; })
      .def("__sub__", [](const Expr& a, const Expr& b) { return a - b; })
      .def("__sub__", [](const Expr& a, double b) { return a - b; })
      .def("__rsub__", [](const Expr& a, double b) { return b - a; })
      .def("__mul__", [](const Expr& a, const Expr& b) { return a * b; })
      .def("__mul__", [](const Expr& a, double b) { return a * b; })
      .def("__rmul__", [](const Expr& a, double b) { return b * a; })
      .def("__rmatmul__", [](const Expr& a, const Eigen::MatrixXd& m) { return make_constant(m) * a; })
      .def("__le__", [](const Expr& a, const Expr& b) { return a <= b; })
      .def("__le__", [](const Expr& a, double b) { return a <= b; })
      .def("__ge__", [](const Expr& a, const Expr& b) { return a >= b; })
      .def("__ge__", [](const Expr& a, double b) { return a >= b; })
      .def("__eq__", [](const Expr& a, const Expr& b) { return a == b; })
      .def("__eq__", [](const Expr& a, double b) { return a == b; });

  m.def("Variable", [](int n, std::string name) { return make_variable(n, std::move(name)); },
        py::arg("n") = 1, py::arg("name") = "");
  m.def("Parameter",
        [](int n, const std::string& sign, std::string name) {
          return make_parameter(n, to_sign(sign), std::move(name));
        },
        py::arg("n") = 1, py::arg("sign") = "unknown", py::arg("name") = "");
  m.def("Constant", [](const Eigen::MatrixXd& v) { return make_constant(v); });
  m.def("Constant", [](double v) { return make_constant(v); });

  m.def("sum", &dcpx::sum);
  m.def("abs", &dcpx::abs);
  m.def("square", &square);
  m.def("sum_squares", &sum_squares);
  m.def("norm1", &norm1);
  m.def("norm2", &norm2);
  m.def("norm_inf", &norm_inf);
  m.def("pos", &pos);
  m.def("maximum", [](std::vector<Expr> args) { return maximum(std::move(args)); });
  m.def("minimum", [](std::vector<Expr> args) { return minimum(std::move(args)); });

  m.def("curvature", [](const Expr& e, bool signs) { return std::string(to_string(curvature(e, signs))); },
        py::arg("expr"), py::arg("signs") = true);
  m.def("sign", [](const Expr& e) { return std::string(to_string(sign(e))); });

  py::class_<Constraint>(m, "Constraint")
      .def("__repr__", [](const Constraint& c) {
        return to_string(c.lhs) + " " + to_string(c.relation) + " " + to_string(c.rhs);
      });

  py::class_<Problem>(m, "Problem")
      .def_property_readonly("sense", [](const Problem& p) { return std::string(to_string(p.sense())); })
      .def_property_readonly("objective", &Problem::objective)
      .def_property_readonly("constraints", &Problem::constraints)
      .def("is_dcp", [](const Problem& p, bool signs) { return is_dcp(p, signs).compliant; },
           py::arg("signs") = true)
      .def("canonicalization_count", &Problem::canonicalization_count)
      .def("__add__", [](const Problem& p, const Problem& q) { return p + q; });

  m.def("minimize", [](const Expr& obj, std::vector<Constraint> cons) { return minimize(obj, std::move(cons)); },
        py::arg("objective"), py::arg("constraints") = std::vector<Constraint>{});
  m.def("maximize", [](const Expr& obj, std::vector<Constraint> cons) { return maximize(obj, std::move(cons)); },
        py::arg("objective"), py::arg("constraints") = std::vector<Constraint>{});

  py::class_<Solution>(m, "Solution")
      .def_property_readonly("status", [](const Solution& s) { return std::string(to_string(s.status)); })
      .def_readonly("value", &Solution::value)
      .def_readonly("iterations", &Solution::iterations)
      .def_readonly("error", &Solution::error)
      .def("value_of", [](const Solution& s, const Expr& v) { return Eigen::VectorXd(s.value_of(v)); });

  m.def("solve",
        [](const Problem& p, const py::dict& params, std::optional<double> tol,
           std::optional<int> max_iters) {
          const ParamBinding b = to_binding(params);
          const SolverSettings st = to_settings(tol, max_iters);
          py::gil_scoped_release release;
          return solve(p, b, st);
        },
        py::arg("problem"), py::arg("params") = py::dict(), py::arg("tol") = py::none(),
        py::arg("max_iters") = py::none());
  m.def("sweep",
        [](const Problem& p, const Expr& param, std::vector<double> values, int jobs,
           const py::dict& params, std::optional<double> tol) {
          const ParamBinding b = to_binding(params);
          const SolverSettings st = to_settings(tol, std::nullopt);
          py::gil_scoped_release release;
          return sweep(p, SweepSpec{param, std::move(values), jobs}, b, st);
        },
        py::arg("problem"), py::arg("parameter"), py::arg("values"), py::arg("jobs") = 1,
        py::arg("params") = py::dict(), py::arg("tol") = py::none());
  m.def("logspace", &logspace);
  m.def("canonicalize",
        [](const Problem& p, const py::dict& params) {
          return write_cone_program(p.canon_template()->stuff(to_binding(params)));
        },
        py::arg("problem"), py::arg("params") = py::dict());

  py::class_<LoadedProblem>(m, "LoadedProblem")
      .def_readonly("problem", &LoadedProblem::problem)
      .def_readonly("symbols", &LoadedProblem::symbols)
      .def_property_readonly("defaults", [](const LoadedProblem& lp) {
        py::dict d;
        for (const Expr& p : lp.parameters) {
          if (const Eigen::VectorXd* v = lp.defaults.find(p.id())) d[py::cast(p)] = *v;
        }
        return d;
      });
  m.def("parse", [](const std::string& text) { return parse_problem_file(text); });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
