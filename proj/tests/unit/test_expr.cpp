#include <doctest.h>

#include <cmath>

#include "helpers.hpp"

using namespace dcpx;

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)); }

}  // namespace

TEST_CASE("leaves carry shape, id and sign") {
  Expr x = make_variable(3, "x");
  Expr y = make_variable(1, "y");
  CHECK(x.shape() == Shape(3, 1));
  CHECK(y.id() > x.id());
  Expr g = make_parameter(1, Sign::Nonneg, "g");
  CHECK(g.declared_sign() == Sign::Nonneg);
  Expr c = make_constant(-2.0);
  CHECK(c.declared_sign() == Sign::Nonpos);
  CHECK_THROWS_AS(make_variable(Shape(2, 2)), Error);
  CHECK_THROWS_AS(Shape(0, 1), Error);
  Eigen::MatrixXd bad(1, 1);
  bad(0, 0) = std::nan("");
  CHECK_THROWS_AS(make_constant(bad), Error);
}

TEST_CASE("shape rules reject mismatches with typed errors") {
  Expr x = make_variable(3);
  Expr y = make_variable(2);
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ContractViolation;
  };
  CHECK(code_of([&] { return x + y; }) == ErrorCode::ShapeMismatch);
  CHECK(code_of([&] { return maximum({x, y}); }) == ErrorCode::ShapeMismatch);
  CHECK(code_of([&] { return index(x, 3); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([&] { return index(x, -1); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([&] { return x * y; }) == ErrorCode::NonAffineProduct);
  CHECK(code_of([&] { return apply_atom(AtomKind::Abs, {x, y}); }) == ErrorCode::ArityError);
  CHECK(code_of([&] { return maximum({x}); }) == ErrorCode::ArityError);
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(2, 2);
  CHECK(code_of([&] { return make_constant(a) * x; }) == ErrorCode::ShapeMismatch);
  CHECK((make_constant(Eigen::MatrixXd::Ones(2, 3)) * x).shape() == Shape(2, 1));
  CHECK((x + 1.0).shape() == Shape(3, 1));
  CHECK(sum(x).shape().is_scalar());
  CHECK(norm2(x).shape().is_scalar());
  CHECK(abs(x).shape() == Shape(3, 1));
}

TEST_CASE("products move the constant factor to the front") {
  Expr x = make_variable(2, "x");
  Expr e = x * 3.0;
  CHECK(e.atom() == AtomKind::Scale);
  CHECK(e.args()[0].is_constant());
  CHECK(to_string(e) == "3 * x");
}

TEST_CASE("printing") {
  Expr x = make_variable(2, "x");
  Expr b = make_constant(Eigen::Vector2d(1.0, -2.5));
  CHECK(to_string(sum_squares(x - b)) == "sum_squares(x - [1; -2.5])");
  CHECK(to_string(2.0 * (x + 1.0)) == "2 * (x + 1)");
  CHECK(to_string(maximum({index(x, 0), 0.0 * index(x, 1)})) == "maximum(x[0], 0 * x[1])");
  Expr anon = make_variable(1);
  CHECK(to_string(anon) == "var" + std::to_string(anon.id()));
}

TEST_CASE("evaluate agrees with direct formulas on random inputs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 5;
    Expr x = make_variable(n);
    Expr z = make_variable(n);
    Eigen::VectorXd xv = testing::random_vector(rng, n, 3.0);
    Eigen::VectorXd zv = testing::random_vector(rng, n, 3.0);
    VarValues vals{{x.id(), xv}, {z.id(), zv}};
    Eigen::MatrixXd m = testing::random_vector(rng, 2 * n, 1.0).reshaped(2, n);
    Expr mc = make_constant(m);

    double s = 0, ss = 0, n1 = 0, ninf = 0;
    for (int i = 0; i < n; ++i) {
      s += xv[i];
      ss += xv[i] * xv[i];
      n1 += std::abs(xv[i]);
      ninf = std::max(ninf, std::abs(xv[i]));
    }
    CHECK(close(evaluate_scalar(sum(x), vals), s));
    CHECK(close(evaluate_scalar(sum_squares(x), vals), ss));
    CHECK(close(evaluate_scalar(norm1(x), vals), n1));
    CHECK(close(evaluate_scalar(norm2(x), vals), std::sqrt(ss)));
    CHECK(close(evaluate_scalar(norm_inf(x), vals), ninf));
    CHECK(close(evaluate_scalar(index(x, n - 1), vals), xv[n - 1]));

    const Eigen::MatrixXd ab = evaluate(abs(x), vals);
    const Eigen::MatrixXd sq = evaluate(square(x), vals);
    const Eigen::MatrixXd ps = evaluate(pos(x), vals);
    const Eigen::MatrixXd mx = evaluate(maximum({x, z, make_constant(0.5)}), vals);
    const Eigen::MatrixXd mn = evaluate(minimum({x, z}), vals);
    const Eigen::MatrixXd ad = evaluate(x + z - 2.0, vals);
    const Eigen::MatrixXd ng = evaluate(-x, vals);
    const Eigen::MatrixXd pr = evaluate(mc * x, vals);
    for (int i = 0; i < n; ++i) {
      CHECK(close(ab(i, 0), xv[i] < 0 ? -xv[i] : xv[i]));
      CHECK(close(sq(i, 0), xv[i] * xv[i]));
      CHECK(close(ps(i, 0), xv[i] > 0 ? xv[i] : 0.0));
      CHECK(close(mx(i, 0), std::max({xv[i], zv[i], 0.5})));
      CHECK(close(mn(i, 0), std::min(xv[i], zv[i])));
      CHECK(close(ad(i, 0), xv[i] + zv[i] - 2.0));
      CHECK(close(ng(i, 0), -xv[i]));
    }
    for (int r = 0; r < 2; ++r) {
      double acc = 0;
      for (int j = 0; j < n; ++j) acc += m(r, j) * xv[j];
      CHECK(close(pr(r, 0), acc));
    }
  }
}

TEST_CASE("parameter bindings are checked") {
  Expr g = make_parameter(1, Sign::Nonneg, "g");
  Expr x = make_variable(1, "x");
  VarValues vals{{x.id(), Eigen::VectorXd::Constant(1, 2.0)}};
  ParamBinding b;
  CHECK_THROWS_AS(evaluate(g * x, vals, b), Error);
  b.set(g, -1.0);
  try {
    evaluate(g * x, vals, b);
    FAIL("expected SignViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SignViolation);
  }
  b.set(g, 3.0);
  CHECK(evaluate_scalar(g * x, vals, b) == 6.0);
  b.set(g, Eigen::VectorXd::Constant(2, 1.0));
  CHECK_THROWS_AS(evaluate(g * x, vals, b), Error);
}

TEST_CASE("freezing replaces parameters by constants") {
  Expr g = make_parameter(1, Sign::Unknown, "g");
  Expr x = make_variable(1, "x");
  ParamBinding b;
  b.set(g, 4.0);
  Expr f = freeze_parameters(g * x + g, b);
  CHECK(f.is_parameter_free());
  VarValues vals{{x.id(), Eigen::VectorXd::Constant(1, 0.5)}};
  CHECK(evaluate_scalar(f, vals) == evaluate_scalar(g * x + g, vals, b));
}

TEST_CASE("atom table") {
  for (const AtomMeta& m : all_atoms()) {
    CHECK(atom_meta(m.kind).name == m.name);
    CHECK(atom_from_name(m.name) == m.kind);
  }
  CHECK(all_atoms().size() == 14);
  CHECK_FALSE(atom_from_name("frob").has_value());
}
