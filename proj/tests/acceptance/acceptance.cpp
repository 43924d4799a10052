// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dcpx/cli.hpp"
#include "dcpx/dcpx.hpp"

using namespace dcpx;
namespace fs = std::filesystem;

namespace {

std::string g_fixtures;
std::string g_goldens;
bool g_regen = false;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& name) { return g_fixtures + "/" + name + ".dcp"; }

LoadedProblem load(const std::string& name) { return parse_problem_file(read_text(fixture(name))); }

std::vector<std::string> fixture_names() {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(g_fixtures)) {
    if (e.path().extension() == ".dcp") out.push_back(e.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome signed_dcp() {
  Outcome o;
  Expr x = make_variable(1, "x");
  Expr e = square(square(x));
  const auto t0 = Clock::now();
  const Curvature with = curvature(e, true);
  const double dt = seconds_since(t0);
  const Curvature without = curvature(e, false);
  o.require(with == Curvature::Convex, std::string("signed verdict ") + to_string(with));
  o.require(without == Curvature::Unknown, std::string("unsigned verdict ") + to_string(without));
  o.require(dt < 1e-3, "analysis took " + fmt("%.3g", dt) + " s");
  if (o.pass) o.detail = "convex with signs, unknown without, " + fmt("%.1f", dt * 1e6) + " us";
  return o;
}

// Hand-derived optimal values of the fixtures.
const std::map<std::string, double>& analytic_values() {
  static const std::map<std::string, double> v = {
      {"abs_eq", 1.0},
      {"box_least_squares", 1.0},
      {"flow", 2.0 / 3.0},
      {"lasso", 0.25 + 0.25 + 0.25 + 0.04 + 0.0 + 4.5},
      {"least_squares_interior", 0.0},
      {"lp_2d", -8.0},
      {"lp_simple", 2.0},
      {"maximize_minimum", 2.0},
      {"minimize_maximum", 0.5},
      {"nested_square", 1.0},
      {"norm1_shift", 6.0},
      {"norm2_projection", std::sqrt(2.0)},
      {"norm_inf", 1.0},
      {"pos_hinge", 0.2},
      {"square_shift", 4.0},
  };
  return v;
}

Outcome tightness() {
  Outcome o;
  const auto t0 = Clock::now();
  int count = 0;
  double worst = 0.0;
  for (const std::string& name : fixture_names()) {
    const LoadedProblem lp = load(name);
    if (!is_dcp(lp.problem).compliant) continue;
    const Solution sol = solve(lp.problem, lp.defaults);
    const ConeProgram prog = lp.problem.canon_template()->stuff(lp.defaults);
    const ConeSolution ref = oracle_solve(prog);
    if (ref.status != Status::Optimal) {
      o.require(sol.status == ref.status, name + ": status " + to_string(sol.status) + " vs oracle " +
                                              to_string(ref.status));
      continue;
    }
    double oracle = ref.objective(prog) + prog.offset;
    if (lp.problem.sense() == Sense::Maximize) oracle = -oracle;
    const double err = std::abs(sol.value - oracle) / (1.0 + std::abs(oracle));
    worst = std::max(worst, err);
    o.require(sol.status == Status::Optimal, name + ": status " + to_string(sol.status));
    o.require(err <= 1e-4, name + ": pipeline " + fmt("%.8g", sol.value) + " vs oracle " +
                               fmt("%.8g", oracle));
    auto known = analytic_values().find(name);
    o.require(known != analytic_values().end(), name + ": no hand-derived value");
    if (known != analytic_values().end()) {
      o.require(std::abs(oracle - known->second) <= 1e-4 * (1.0 + std::abs(known->second)),
                name + ": oracle " + fmt("%.8g", oracle) + " vs derived " + fmt("%.8g", known->second));
    }
    ++count;
  }
  const double dt = seconds_since(t0);
  o.require(count >= 12, "only " + std::to_string(count) + " optimal fixtures");
  o.require(dt < 10.0, "suite took " + fmt("%.2f", dt) + " s");
  if (o.pass) {
    o.detail = std::to_string(count) + " fixtures, worst relative error " + fmt("%.2e", worst) +
               ", " + fmt("%.2f", dt) + " s";
  }
  return o;
}

double soft(double b, double k) { return std::copysign(std::max(std::abs(b) - k, 0.0), b); }

Outcome lasso_closed_form() {
  Outcome o;
  const LoadedProblem lp = load("lasso");
  const Expr x = lp.symbols.at("x");
  const Expr gamma = lp.symbols.at("gamma");
  const Eigen::VectorXd b = lp.symbols.at("b").value().col(0);
  double worst = 0.0;
  for (double g : {0.1, 1.0, 10.0}) {
    ParamBinding binding;
    binding.set(gamma, g);
    const Solution sol = solve(lp.problem, binding);
    o.require(sol.status == Status::Optimal, "gamma " + fmt("%g", g) + ": " + to_string(sol.status));
    if (sol.status != Status::Optimal) continue;
    const Eigen::VectorXd& xv = sol.value_of(x);
    for (int i = 0; i < 5; ++i) {
      const double err = std::abs(xv[i] - soft(b[i], g / 2));
      worst = std::max(worst, err);
      o.require(err <= 1e-4, "gamma " + fmt("%g", g) + " entry " + std::to_string(i));
    }
  }
  if (o.pass) o.detail = "max entry error " + fmt("%.2e", worst);
  return o;
}

// The sweep is solved at tolerance 1e-9: at the default 1e-6 the largest
// gamma values stop early enough to break monotonicity by more than 1e-6.
SolverSettings sweep_settings() {
  SolverSettings s;
  s.eps_primal = s.eps_dual = s.eps_gap = 1e-9;
  return s;
}

Outcome tradeoff_curve() {
  Outcome o;
  const LoadedProblem lp = load("lasso");
  const Expr x = lp.symbols.at("x");
  const Eigen::MatrixXd a = lp.symbols.at("A").value();
  const Eigen::VectorXd b = lp.symbols.at("b").value().col(0);
  const std::vector<double> gammas = logspace(-4, 6, 50);
  const auto sols =
      sweep(lp.problem, SweepSpec{lp.symbols.at("gamma"), gammas, 4}, lp.defaults, sweep_settings());
  std::vector<double> l1, ls;
  for (std::size_t i = 0; i < sols.size(); ++i) {
    o.require(sols[i].status == Status::Optimal, "point " + std::to_string(i) + ": " +
                                                     to_string(sols[i].status));
    if (sols[i].status != Status::Optimal) return o;
    const Eigen::VectorXd& xv = sols[i].value_of(x);
    l1.push_back(xv.lpNorm<1>());
    ls.push_back((a * xv - b).squaredNorm());
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < l1.size(); ++i) {
    worst = std::max({worst, l1[i] - l1[i - 1], ls[i - 1] - ls[i]});
    o.require(l1[i] <= l1[i - 1] + 1e-6, "norm1 increases at point " + std::to_string(i));
    o.require(ls[i] >= ls[i - 1] - 1e-6, "residual decreases at point " + std::to_string(i));
  }
  const std::string path = fixture("lasso");
  const std::vector<std::string> base = {"sweep", path, "--param", "gamma", "--logspace", "-4", "6",
                                         "50", "--tol", "1e-9", "--format", "machine",
                                         "--column", "norm1(x)", "--column", "sum_squares(A * x - b)"};
  auto with_jobs = [&](const char* j) {
    std::vector<std::string> args = base;
    args.insert(args.end(), {"--jobs", j});
    return cli(args);
  };
  const CliRun one = with_jobs("1");
  const CliRun four = with_jobs("4");
  o.require(one.code == kExitOk, "sweep exit " + std::to_string(one.code) + ": " + one.err);
  o.require(one.out == four.out, "--jobs 4 output differs from --jobs 1");
  if (o.pass) o.detail = "50 points, largest adverse step " + fmt("%.2e", worst) + ", jobs 1 == jobs 4";
  return o;
}

Outcome parameter_caching() {
  Outcome o;
  const LoadedProblem lp = load("lasso");
  const Expr gamma = lp.symbols.at("gamma");
  const std::vector<double> gammas = logspace(-4, 6, 50);
  sweep(lp.problem, SweepSpec{gamma, gammas, 4}, lp.defaults);
  const std::size_t count = lp.problem.canonicalization_count();
  o.require(count == 1, "canonicalized " + std::to_string(count) + " times");
  auto tmpl = lp.problem.canon_template();
  for (std::size_t i : {0u, 12u, 25u, 37u, 49u}) {
    ParamBinding binding;
    binding.set(gamma, gammas[i]);
    o.require(identical(tmpl->stuff(binding), canonicalize_frozen(lp.problem, binding)),
              "point " + std::to_string(i) + " differs from fresh canonicalization");
  }
  o.require(lp.problem.canonicalization_count() == 1, "spot checks re-canonicalized the problem");
  if (o.pass) o.detail = "1 canonicalization for 50 points, 5 spot checks identical";
  return o;
}

// Network flow assembled from per-vertex and per-edge problems.
struct Edge {
  Expr flow = make_variable(1, "f");
  Problem cost() const { return minimize(square(flow)); }
};

struct Vertex {
  Expr source;
  double target;
  std::vector<std::pair<const Edge*, double>> incident;  // edge, +1 in / -1 out

  Vertex(std::string name, double t) : source(make_variable(1, std::move(name))), target(t) {}

  Expr net() const {
    Expr total = source;
    for (const auto& [e, dir] : incident) total = total + dir * e->flow;
    return total;
  }
  Problem cost() const { return minimize(square(source - target), {net() == 0.0}); }
};

Outcome flow_composition() {
  Outcome o;
  Edge e;
  Vertex v1("s1", 1.0), v2("s2", -1.0);
  v1.incident.push_back({&e, -1.0});
  v2.incident.push_back({&e, 1.0});
  const Problem p = add_problems(add_problems(e.cost(), v1.cost()), v2.cost());
  o.require(p.constraints().size() == 2, "constraint count " + std::to_string(p.constraints().size()));
  const Solution sol = solve(p);
  o.require(sol.status == Status::Optimal, std::string("status ") + to_string(sol.status));
  if (!o.pass) return o;
  const double f = sol.value_of(e.flow)[0];
  o.require(std::abs(f - 2.0 / 3.0) <= 1e-4, "f = " + fmt("%.8g", f));
  double worst = 0.0;
  for (const Vertex* v : {&v1, &v2}) {
    worst = std::max(worst, std::abs(evaluate_scalar(v->net(), sol.primal)));
  }
  o.require(worst <= 1e-6, "conservation residual " + fmt("%.2e", worst));
  if (o.pass) o.detail = "f = " + fmt("%.6f", f) + ", conservation residual " + fmt("%.2e", worst);
  return o;
}

Outcome certificates() {
  Outcome o;
  const Solution inf = solve(load("infeasible").problem);
  o.require(inf.status == Status::Infeasible, std::string("infeasible LP: ") + to_string(inf.status));
  o.require(inf.iterations <= 100000, "infeasible LP took " + std::to_string(inf.iterations));
  const Solution unb = solve(load("unbounded").problem);
  o.require(unb.status == Status::Unbounded, std::string("min x: ") + to_string(unb.status));
  o.require(unb.iterations <= 100000, "min x took " + std::to_string(unb.iterations));
  if (o.pass) {
    o.detail = "infeasible after " + std::to_string(inf.iterations) + " iterations, unbounded after " +
               std::to_string(unb.iterations);
  }
  return o;
}

Outcome projections() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> d(0.0, 3.0);
  auto random = [&](int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = d(rng);
    return v;
  };
  const std::vector<std::pair<std::string, ConeSpec>> cones = {
      {"zero", ConeSpec{4, 0, {}}}, {"nonneg", ConeSpec{0, 4, {}}}, {"soc", ConeSpec{0, 0, {4}}}};
  double worst_idem = 0.0, worst_exp = 0.0;
  for (const auto& [name, k] : cones) {
    for (int i = 0; i < 1000; ++i) {
      const Eigen::VectorXd z = random(k.total());
      const Eigen::VectorXd w = random(k.total());
      const Eigen::VectorXd pz = project_cone(z, k);
      const double idem = (project_cone(pz, k) - pz).norm();
      const double exp = (pz - project_cone(w, k)).norm() - (z - w).norm();
      worst_idem = std::max(worst_idem, idem);
      worst_exp = std::max(worst_exp, exp);
      o.require(idem <= 1e-12, name + ": projection not idempotent");
      o.require(exp <= 1e-12, name + ": projection expands a distance");
    }
  }
  if (o.pass) {
    o.detail = "3x1000 vectors, idempotence error " + fmt("%.1e", worst_idem) + ", expansion " +
               fmt("%.1e", worst_exp);
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  std::vector<std::string> first;
  for (int run = 0; run < 3; ++run) {
    std::vector<std::string> outputs;
    for (const std::string& name : fixture_names()) {
      const CliRun canon = cli({"canon", fixture(name)});
      const CliRun solved = cli({"solve", fixture(name), "--format", "machine"});
      outputs.push_back(canon.out + canon.err + solved.out + solved.err);
    }
    if (run == 0) {
      first = outputs;
    } else {
      o.require(outputs == first, "run " + std::to_string(run + 1) + " differs from run 1");
    }
  }
  if (o.pass) o.detail = std::to_string(first.size()) + " fixtures identical across 3 runs";
  return o;
}

std::string golden_text(const CliRun& r) {
  std::string s = r.out;
  std::string err = r.err;
  for (std::size_t p; (p = err.find(g_fixtures + "/")) != std::string::npos;) {
    err.erase(p, g_fixtures.size() + 1);
  }
  if (!err.empty()) s += "[stderr]\n" + err;
  s += "[exit " + std::to_string(r.code) + "]\n";
  return s;
}

Outcome goldens() {
  Outcome o;
  int compared = 0;
  for (const std::string& name : fixture_names()) {
    for (const char* cmd : {"parse", "check", "canon", "solve"}) {
      const std::string text = golden_text(cli({cmd, fixture(name)}));
      const std::string path = g_goldens + "/" + name + "." + cmd + ".txt";
      if (g_regen) std::ofstream(path, std::ios::binary) << text;
      o.require(fs::exists(path), "missing golden " + path);
      o.require(read_text(path) == text, name + "." + cmd + " differs from its golden");
      ++compared;
    }
  }
  if (o.pass) o.detail = std::to_string(compared) + " outputs match";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  app.add_option("--fixtures", g_fixtures, "Fixture directory")->required();
  app.add_option("--goldens", g_goldens, "Golden output directory")->required();
  app.add_flag("--regen", g_regen, "Rewrite golden files before comparing");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"signed DCP", signed_dcp},
      {"canonicalization tightness", tightness},
      {"LASSO closed form", lasso_closed_form},
      {"trade-off curve", tradeoff_curve},
      {"parameter caching", parameter_caching},
      {"flow composition", flow_composition},
      {"solver certificates", certificates},
      {"projection properties", projections},
      {"determinism", determinism},
      {"CLI goldens", goldens},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    failed += out.pass ? 0 : 1;
    std::cout << (out.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first
              << ": " << out.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
