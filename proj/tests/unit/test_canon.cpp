#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace dcpx;

namespace {

struct Parametric {
  Expr x = make_variable(3, "x");
  Expr y = make_variable(1, "y");
  Expr gamma = make_parameter(1, Sign::Nonneg, "gamma");
  Expr shift = make_parameter(3, Sign::Unknown, "shift");
  Expr weight = make_parameter(1, Sign::Unknown, "w");
  Problem problem;

  Parametric() : problem(make()) {}

  Problem make() const {
    Eigen::MatrixXd a(2, 3);
    a << 1, 2, 0, -1, 0.5, 3;
    Expr obj = sum_squares(make_constant(a) * x - index(shift, 0)) + gamma * norm1(x - shift) +
               pos(weight * y - 1.0) + gamma * 2.0;
    return minimize(obj, {norm2(x + shift) <= 4.0 * gamma + y, weight * y >= -3.0,
                          sum(x) == index(shift, 2), maximum({y, index(x, 1)}) <= 2.0});
  }

  ParamBinding random_binding(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.05, 5.0);
    ParamBinding b;
    b.set(gamma, u(rng));
    b.set(shift, testing::random_vector(rng, 3, 2.0));
    b.set(weight, u(rng) * (rng() % 2 ? 1.0 : -1.0));
    return b;
  }
};

}  // namespace

TEST_CASE("stuffing a template equals canonicalizing with frozen parameters") {
  Parametric p;
  std::mt19937_64 rng(3);
  auto tmpl = p.problem.canon_template();
  CHECK(tmpl->num_parameter_entries() > 0);
  for (int k = 0; k < 100; ++k) {
    const ParamBinding b = p.random_binding(rng);
    const ConeProgram stuffed = tmpl->stuff(b);
    const ConeProgram frozen = canonicalize_frozen(p.problem, b);
    REQUIRE(identical(stuffed, frozen));
    CHECK(stuffed.offset == frozen.offset);
  }
  CHECK(p.problem.canonicalization_count() == 1);
  CHECK(tmpl->stuff_count() == 100);
}

TEST_CASE("canonicalization is deterministic") {
  Parametric p;
  std::mt19937_64 rng(5);
  const ParamBinding b = p.random_binding(rng);
  const std::string first = write_cone_program(canonicalize(p.problem)->stuff(b));
  for (int k = 0; k < 3; ++k) {
    CHECK(write_cone_program(canonicalize(p.problem)->stuff(b)) == first);
  }
}

TEST_CASE("abs with an equality canonicalizes to two variables and one zero row") {
  const LoadedProblem lp = testing::load_fixture("abs_eq.dcp");
  const ConeProgram prog = lp.problem.canon_template()->stuff(lp.defaults);
  CHECK(prog.num_vars() == 2);
  CHECK(prog.cones.zero == 1);
  CHECK(prog.cones.nonneg == 2);
  CHECK(prog.cones.soc.empty());
  // User variable first, epigraph variable second; objective is the epigraph.
  CHECK(prog.c[0] == 0.0);
  CHECK(prog.c[1] == 1.0);
  CHECK(prog.var_index.at(lp.variables[0].id()) == ColumnRange{0, 1});
}

TEST_CASE("piecewise-linear problems need no second-order cones") {
  for (const char* name : {"lp_simple.dcp", "lp_2d.dcp", "norm1_shift.dcp", "norm_inf.dcp",
                           "pos_hinge.dcp", "maximize_minimum.dcp", "minimize_maximum.dcp"}) {
    const LoadedProblem lp = testing::load_fixture(name);
    CHECK_MESSAGE(lp.problem.canon_template()->cones().soc.empty(), name);
  }
  const LoadedProblem sq = testing::load_fixture("square_shift.dcp");
  CHECK_FALSE(sq.problem.canon_template()->cones().soc.empty());
}

TEST_CASE("rows are ordered zero, nonnegative, second-order") {
  Parametric p;
  auto tmpl = p.problem.canon_template();
  const auto& rows = tmpl->constraint_rows();
  REQUIRE(rows.size() == 4);
  CHECK(rows[2].cone == ConeKind::Zero);
  CHECK(rows[2].first_row == 0);
  const int nonneg_end = tmpl->cones().zero + tmpl->cones().nonneg;
  for (int k : {0, 1, 3}) {
    CHECK(rows[k].cone == ConeKind::Nonneg);
    CHECK(rows[k].first_row >= tmpl->cones().zero);
    CHECK(rows[k].first_row + rows[k].num_rows <= nonneg_end);
  }
  // Within a segment, user constraints keep their order.
  CHECK(rows[0].first_row < rows[1].first_row);
  CHECK(rows[1].first_row < rows[3].first_row);
  CHECK(tmpl->cones().soc.size() >= 2);
}

TEST_CASE("each graph implementation is tight at a fixed argument") {
  // minimize f(x) subject to x == x0 must return f(x0) through the epigraph.
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 8; ++trial) {
    Expr x = make_variable(3, "x");
    const Eigen::VectorXd x0 = testing::random_vector(rng, 3, 2.0);
    const Expr c0 = make_constant(Eigen::MatrixXd(x0));
    const Expr a = index(x, 0);
    const Expr b = index(x, 1);
    const std::vector<Expr> convex = {sum(abs(x)), sum(square(x)), sum_squares(x), norm1(x),
                                      norm2(x), norm_inf(x), sum(pos(x)), maximum({a, b, make_constant(0.3)})};
    for (const Expr& f : convex) {
      Problem prob = minimize(f, {x == c0});
      const ConeProgram prog = canonicalize(prob)->stuff({});
      const ConeSolution sol = oracle_solve(prog);
      REQUIRE(sol.status == Status::Optimal);
      const double want = evaluate_scalar(f, {{x.id(), x0}});
      CHECK_MESSAGE(std::abs(sol.objective(prog) + prog.offset - want) <= 1e-5 * (1 + want),
                    to_string(f));
    }
    Problem hyp = maximize(minimum({a, b, make_constant(-0.3)}), {x == c0});
    const ConeProgram prog = canonicalize(hyp)->stuff({});
    const ConeSolution sol = oracle_solve(prog);
    REQUIRE(sol.status == Status::Optimal);
    const double want = std::min({x0[0], x0[1], -0.3});
    CHECK(std::abs(-(sol.objective(prog) + prog.offset) - want) <= 1e-5 * (1 + std::abs(want)));
  }
}

TEST_CASE("products of parameters are rejected") {
  Expr x = make_variable(1, "x");
  Expr g = make_parameter(1, Sign::Nonneg, "g");
  Expr h = make_parameter(1, Sign::Nonneg, "h");
  Problem p = minimize(g * (h * x));
  try {
    canonicalize(p);
    FAIL("expected NonAffineParameter");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonAffineParameter);
  }
}

TEST_CASE("non-DCP problems fail canonicalization") {
  const LoadedProblem lp = testing::load_fixture("not_dcp.dcp");
  CHECK_THROWS_AS(canonicalize(lp.problem), NotDcpError);
}

TEST_CASE("missing or mis-signed bindings fail stuffing") {
  Parametric p;
  auto tmpl = p.problem.canon_template();
  CHECK_THROWS_AS(tmpl->stuff({}), Error);
  std::mt19937_64 rng(1);
  ParamBinding b = p.random_binding(rng);
  b.set(p.gamma, -1.0);
  try {
    tmpl->stuff(b);
    FAIL("expected SignViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SignViolation);
  }
}

TEST_CASE("cone program dumps round-trip bit for bit") {
  Parametric p;
  std::mt19937_64 rng(21);
  for (int k = 0; k < 10; ++k) {
    const ConeProgram prog = p.problem.canon_template()->stuff(p.random_binding(rng));
    const std::string text = write_cone_program(prog);
    const ConeProgram back = read_cone_program(text);
    CHECK(identical(prog, back));
    CHECK(write_cone_program(back) == text);
  }
  CHECK_THROWS_AS(read_cone_program("cone-program v1\nvars 2\nc 1\n"), Error);
  CHECK_THROWS_AS(read_cone_program("not a dump"), Error);
}

TEST_CASE("recovery maps columns back to variables") {
  const LoadedProblem lp = testing::load_fixture("square_shift.dcp");
  auto tmpl = lp.problem.canon_template();
  const ConeProgram prog = tmpl->stuff(lp.defaults);
  const ConeSolution cs = oracle_solve(prog);
  REQUIRE(cs.status == Status::Optimal);
  const RecoveredSolution rec = recover_solution(cs, *tmpl, lp.defaults);
  CHECK(rec.values.size() == lp.variables.size());
  CHECK(rec.objective == doctest::Approx(evaluate_scalar(lp.problem.objective(), rec.values)));
  ConeSolution bad = cs;
  bad.status = Status::Infeasible;
  CHECK_THROWS_AS(recover_solution(bad, *tmpl, lp.defaults), Error);
}

TEST_CASE("zero-valued parameters keep the template pattern") {
  const LoadedProblem lp = testing::load_fixture("lasso.dcp");
  ParamBinding b;
  b.set(lp.parameters[0], 0.0);
  const ConeProgram stuffed = lp.problem.canon_template()->stuff(b);
  const ConeProgram frozen = canonicalize_frozen(lp.problem, b);
  CHECK(stuffed.num_vars() == frozen.num_vars());
  CHECK(stuffed.cones == frozen.cones);
  CHECK(identical(stuffed, frozen));
}
