#include "dcpx/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dcpx/canon.hpp"
#include "dcpx/dcp.hpp"
#include "dcpx/oracle.hpp"
#include "dcpx/solve.hpp"
#include "dcpx/syntax.hpp"

namespace dcpx {

namespace {

enum class Format { Text, Machine };

struct SolveOptions {
  std::vector<std::string> params;
  double tol = 0.0;
  int max_iter = 0;
  std::string format = "text";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ContractViolation, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixed4(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  std::string s = buf;
  if (s == "-0.0000") s = "0.0000";
  return s;
}

std::string sci4(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4e", v);
  return buf;
}

std::string full(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string number(double v, Format f) { return f == Format::Text ? fixed4(v) : full(v); }

std::string vector_text(const Eigen::VectorXd& v, Format f) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) s += " ";
    s += number(v[i], f);
  }
  return s;
}

Format parse_format(const std::string& s) {
  if (s == "text") return Format::Text;
  if (s == "machine") return Format::Machine;
  throw Error(ErrorCode::InvalidSettings, "unknown format '" + s + "'");
}

SolverSettings make_settings(const SolveOptions& o) {
  SolverSettings s;
  if (o.tol > 0) s.eps_primal = s.eps_dual = s.eps_gap = o.tol;
  if (o.max_iter > 0) s.max_iters = o.max_iter;
  s.validate();
  return s;
}

Expr find_parameter(const LoadedProblem& lp, const std::string& name) {
  auto it = lp.symbols.find(name);
  if (it == lp.symbols.end() || !it->second.is_parameter()) {
    throw Error(ErrorCode::UndeclaredIdentifier, "no parameter named '" + name + "'");
  }
  return it->second;
}

// Applies `name=value` overrides on top of the data-section defaults.
ParamBinding bind_params(const LoadedProblem& lp, const std::vector<std::string>& assignments) {
  ParamBinding b = lp.defaults;
  for (const std::string& a : assignments) {
    auto eq = a.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, "expected name=value, got '" + a + "'");
    }
    Expr p = find_parameter(lp, a.substr(0, eq));
    Eigen::MatrixXd m;
    try {
      m = parse_value_literal(a.substr(eq + 1));
    } catch (const SourceError& e) {
      throw Error(e.code(), "value for '" + a.substr(0, eq) + "': " + e.detail());
    }
    if (m.cols() != 1) {
      throw Error(ErrorCode::ShapeMismatch, "value for '" + a.substr(0, eq) + "' must be a vector");
    }
    b.set(p, Eigen::VectorXd(m.col(0)));
  }
  for (const Expr& p : lp.parameters) {
    if (b.contains(p.id())) bound_value(p, b);
  }
  return b;
}

// ---------------------------------------------------------------------------
// check

void print_tree(DcpAnalyzer& an, const Expr& e, int depth, std::ostream& out) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "  %-9s%-8s", to_string(an.curvature(e)), to_string(an.sign(e)));
  out << buf << std::string(static_cast<std::size_t>(2 * depth), ' ') << to_string(e) << "\n";
  if (!e.is_atom()) return;
  for (const Expr& a : e.args()) print_tree(an, a, depth + 1, out);
}

int cmd_check(const LoadedProblem& lp, bool no_signs, std::ostream& out) {
  const Problem& p = lp.problem;
  DcpAnalyzer an(!no_signs);
  const DcpVerdict v = is_dcp(p, !no_signs);
  out << "signs: " << (no_signs ? "off" : "on") << "\n";
  out << "objective: " << to_string(p.sense()) << " " << to_string(v.objective) << "\n";
  print_tree(an, p.objective(), 0, out);
  for (std::size_t k = 0; k < p.constraints().size(); ++k) {
    const Constraint& c = p.constraints()[k];
    out << "constraint " << k << ": " << to_string(v.constraints[k].first) << " "
        << to_string(c.relation) << " " << to_string(v.constraints[k].second) << "\n";
    print_tree(an, c.lhs, 0, out);
    out << "  " << to_string(c.relation) << "\n";
    print_tree(an, c.rhs, 0, out);
  }
  if (v.compliant) {
    out << "verdict: DCP\n";
    return kExitOk;
  }
  out << "verdict: not DCP\n";
  out << "offense: " << describe(*v.offense) << "\n";
  return kExitUsage;
}

// ---------------------------------------------------------------------------
// solve

int exit_code(Status s) {
  switch (s) {
    case Status::Optimal:
    case Status::Infeasible:
    case Status::Unbounded: return kExitOk;
    case Status::MaxItersInaccurate: return kExitInaccurate;
    case Status::Failed: return kExitUsage;
  }
  return kExitUsage;
}

void print_report(const LoadedProblem& lp, const Solution& sol, Format f, std::ostream& out) {
  out << "status: " << to_string(sol.status) << "\n";
  out << "optval: " << number(sol.value, f) << "\n";
  if (!sol.primal.empty()) {
    for (const Expr& v : lp.variables) {
      auto it = sol.primal.find(v.id());
      if (it == sol.primal.end()) continue;  // does not appear in the problem
      out << v.name() << ": " << vector_text(it->second, f) << "\n";
    }
  }
  out << "iterations: " << sol.iterations << "\n";
  auto res = [&](double r) { return f == Format::Text ? sci4(r) : full(r); };
  out << "residuals: primal " << res(sol.residuals.primal) << " dual " << res(sol.residuals.dual)
      << " gap " << res(sol.residuals.gap) << "\n";
}

int cmd_solve(const LoadedProblem& lp, const SolveOptions& o, std::ostream& out) {
  const Format f = parse_format(o.format);
  const SolverSettings settings = make_settings(o);
  const ParamBinding binding = bind_params(lp, o.params);
  const Solution sol = solve(lp.problem, binding, settings);
  print_report(lp, sol, f, out);
  return exit_code(sol.status);
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
  SolveOptions solve;
  std::string param;
  std::vector<double> logspace_args;
  std::vector<double> values;
  int jobs = 1;
  std::vector<std::string> columns;
};

int cmd_sweep(const LoadedProblem& lp, const SweepOptions& o, std::ostream& out) {
  const Format f = parse_format(o.solve.format);
  const SolverSettings settings = make_settings(o.solve);
  Expr p = find_parameter(lp, o.param);
  if (!p.shape().is_scalar()) {
    throw Error(ErrorCode::ShapeMismatch, "sweep parameter '" + o.param + "' is not scalar");
  }
  std::vector<double> values;
  if (!o.logspace_args.empty()) {
    const double n = o.logspace_args[2];
    if (n < 1 || n != std::floor(n)) {
      throw Error(ErrorCode::InvalidSettings, "--logspace needs a positive integer count");
    }
    values = logspace(o.logspace_args[0], o.logspace_args[1], static_cast<int>(n));
  } else {
    values = o.values;
  }
  if (values.empty()) throw Error(ErrorCode::InvalidSettings, "no sweep values given");

  std::vector<Expr> columns;
  for (const std::string& c : o.columns) {
    Expr e;
    try {
      e = parse_expression(c, lp.symbols);
    } catch (const SourceError& err) {
      throw Error(err.code(), "column '" + c + "': " + err.detail());
    }
    if (!e.shape().is_scalar()) {
      throw Error(ErrorCode::ShapeMismatch, "column '" + c + "' is not scalar");
    }
    columns.push_back(e);
  }

  const ParamBinding base = bind_params(lp, o.solve.params);
  SweepSpec spec{p, values, o.jobs};
  const std::vector<Solution> sols = sweep(lp.problem, spec, base, settings);

  out << o.param << "\toptval\tstatus";
  for (const std::string& c : o.columns) out << "\t" << c;
  out << "\n";
  bool inaccurate = false;
  bool failed = false;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    const Solution& s = sols[i];
    inaccurate = inaccurate || s.status == Status::MaxItersInaccurate;
    failed = failed || s.status == Status::Failed;
    out << (f == Format::Text ? sci4(values[i]) : full(values[i])) << "\t" << number(s.value, f)
        << "\t" << to_string(s.status);
    ParamBinding b = base;
    b.set(p, values[i]);
    for (const Expr& c : columns) {
      double v = std::nan("");
      if (!s.primal.empty()) {
        VarValues vals = s.primal;
        for (const Expr& var : collect_variables({c})) {
          if (!vals.count(var.id())) vals[var.id()] = Eigen::VectorXd::Zero(var.size());
        }
        v = evaluate_scalar(c, vals, b);
      }
      out << "\t" << number(v, f);
    }
    out << "\n";
  }
  if (failed) return kExitUsage;
  return inaccurate ? kExitInaccurate : kExitOk;
}

// ---------------------------------------------------------------------------
// solve-cone

int cmd_solve_cone(const std::string& path, const SolveOptions& o, bool use_oracle,
                   std::ostream& out) {
  const Format f = parse_format(o.format);
  const SolverSettings settings = make_settings(o);
  const ConeProgram prog = read_cone_program(read_file(path));
  const ConeSolution sol = use_oracle ? oracle_solve(prog) : solve_cone(prog, settings);
  out << "status: " << to_string(sol.status) << "\n";
  if (sol.status == Status::Optimal || sol.status == Status::MaxItersInaccurate) {
    out << "optval: " << number(sol.objective(prog), f) << "\n";
    out << "x: " << vector_text(sol.x, f) << "\n";
    out << "y: " << vector_text(sol.y, f) << "\n";
  } else if (sol.certificate.size() > 0) {
    out << "certificate: " << vector_text(sol.certificate, f) << "\n";
  }
  out << "iterations: " << sol.iterations << "\n";
  return exit_code(sol.status);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Disciplined convex programming: check, canonicalize and solve problem files",
               "dcpx"};
  app.require_subcommand(1);

  std::string file;
  bool no_signs = false;
  std::vector<std::string> canon_params;
  SolveOptions solve_opts;
  SweepOptions sweep_opts;
  SolveOptions cone_opts;
  bool use_oracle = false;

  auto add_solver_flags = [](CLI::App* cmd, SolveOptions& o) {
    cmd->add_option("--tol", o.tol, "Tolerance for all three residuals")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", o.max_iter, "Iteration limit")->check(CLI::PositiveNumber);
    cmd->add_option("--format", o.format, "Report format")
        ->check(CLI::IsMember({"text", "machine"}));
  };

  CLI::App* parse = app.add_subcommand("parse", "Parse a problem file and print it canonically");
  parse->add_option("file", file, "Problem file")->required();

  CLI::App* check = app.add_subcommand("check", "Report curvature and sign of every node");
  check->add_option("file", file, "Problem file")->required();
  check->add_flag("--no-signs", no_signs, "Ignore argument signs (plain DCP)");

  CLI::App* canon = app.add_subcommand("canon", "Print the canonical cone program");
  canon->add_option("file", file, "Problem file")->required();
  canon->add_option("--param", canon_params, "Parameter value, name=value");

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve a problem file");
  solve_cmd->add_option("file", file, "Problem file")->required();
  solve_cmd->add_option("--param", solve_opts.params, "Parameter value, name=value");
  add_solver_flags(solve_cmd, solve_opts);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Solve for a range of parameter values");
  sweep_cmd->add_option("file", file, "Problem file")->required();
  sweep_cmd->add_option("--param", sweep_opts.param, "Scalar parameter to sweep")->required();
  auto* ls = sweep_cmd->add_option("--logspace", sweep_opts.logspace_args,
                                   "lo hi n: n points from 10^lo to 10^hi")
                 ->expected(3);
  auto* vals = sweep_cmd->add_option("--values", sweep_opts.values, "Comma-separated values")
                   ->delimiter(',');
  ls->excludes(vals);
  sweep_cmd->add_option("--jobs", sweep_opts.jobs, "Concurrent solves")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--column", sweep_opts.columns, "Extra scalar expression column");
  sweep_cmd->add_option("--set", sweep_opts.solve.params, "Other parameter value, name=value");
  add_solver_flags(sweep_cmd, sweep_opts.solve);

  CLI::App* cone_cmd = app.add_subcommand("solve-cone", "Solve a cone-program dump");
  cone_cmd->add_option("file", file, "Dump file")->required();
  cone_cmd->add_flag("--oracle", use_oracle, "Use the dense reference solver");
  add_solver_flags(cone_cmd, cone_opts);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cone_cmd->parsed()) return cmd_solve_cone(file, cone_opts, use_oracle, out);
    const LoadedProblem lp = [&] {
      try {
        return parse_problem_file(read_file(file));
      } catch (const SourceError& e) {
        throw Error(e.code(), file + ":" + e.detail());
      }
    }();
    if (parse->parsed()) {
      out << print_problem(lp.syntax);
      return kExitOk;
    }
    if (check->parsed()) return cmd_check(lp, no_signs, out);
    if (canon->parsed()) {
      const ParamBinding b = bind_params(lp, canon_params);
      out << write_cone_program(lp.problem.canon_template()->stuff(b));
      return kExitOk;
    }
    if (solve_cmd->parsed()) return cmd_solve(lp, solve_opts, out);
    if (sweep_cmd->parsed()) return cmd_sweep(lp, sweep_opts, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace dcpx
