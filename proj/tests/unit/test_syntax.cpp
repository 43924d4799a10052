#include <doctest.h>

#include "helpers.hpp"

using namespace dcpx;

namespace {

SourceError parse_error(const std::string& text) {
  try {
    parse_problem_file(text);
  } catch (const SourceError& e) {
    return e;
  }
  FAIL("expected a SourceError for: " << text);
  return SourceError(ErrorCode::ContractViolation, {}, "");
}

std::string random_source(std::mt19937_64& rng, int depth) {
  const auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  if (depth == 0) {
    switch (pick(5)) {
      case 0: return "x";
      case 1: return "x[" + std::to_string(pick(3)) + "]";
      case 2: return "g";
      case 3: return std::to_string(pick(9)) + ".5";
      default: return "y";
    }
  }
  const std::string a = random_source(rng, depth - 1);
  const std::string b = random_source(rng, depth - 1);
  switch (pick(9)) {
    case 0: return a + " + " + b;
    case 1: return a + " - (" + b + ")";
    case 2: return "-" + a;
    case 3: return "2 * (" + a + ")";
    case 4: return "abs(" + a + ")";
    case 5: return "maximum(" + a + ", " + b + ", 1)";
    case 6: return "norm2(" + a + ")";
    case 7: return "(" + a + ")";
    default: return "sum_squares(" + a + ")";
  }
}

}  // namespace

TEST_CASE("every fixture round-trips through the printer") {
  for (const std::string& name : testing::fixture_names()) {
    CAPTURE(name);
    const ProblemFile file = parse_problem_syntax(testing::read_text(testing::fixture_path(name)));
    const std::string printed = print_problem(file);
    const ProblemFile again = parse_problem_syntax(printed);
    CHECK(same_structure(file, again));
    CHECK(print_problem(again) == printed);
  }
}

TEST_CASE("random expressions round-trip") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 300; ++k) {
    const std::string src =
        "var x[3]\nvar y\nparam g nonneg\nminimize " + random_source(rng, 1 + k % 4) + "\n";
    CAPTURE(src);
    const ProblemFile file = parse_problem_syntax(src);
    const ProblemFile again = parse_problem_syntax(print_problem(file));
    CHECK(same_structure(file, again));
  }
}

TEST_CASE("loaded problems expose symbols and data") {
  const LoadedProblem lp = testing::load_fixture("lasso.dcp");
  CHECK(lp.variables.size() == 1);
  CHECK(lp.parameters.size() == 1);
  CHECK(lp.symbols.count("A") == 1);
  CHECK(lp.symbols.at("A").shape() == Shape(5, 5));
  CHECK(lp.defaults.find(lp.parameters[0].id())->coeff(0) == 1.0);
  CHECK(lp.problem.sense() == Sense::Minimize);

  const Expr e = parse_expression("norm1(x) + gamma * sum(x)", lp.symbols);
  CHECK(to_string(e) == "norm1(x) + gamma * sum(x)");
}

TEST_CASE("diagnostics carry positions and codes") {
  SourceError e = parse_error("var x\nminimize frob(x)\n");
  CHECK(e.code() == ErrorCode::UnknownAtom);
  CHECK(e.pos() == SourcePos{2, 10});
  CHECK(e.detail() == "2:10: unknown atom 'frob'");

  e = parse_error("var x\nminimize x + z\n");
  CHECK(e.code() == ErrorCode::UndeclaredIdentifier);
  CHECK(e.pos() == SourcePos{2, 14});

  e = parse_error("var x\nminimize abs(x, x)\n");
  CHECK(e.code() == ErrorCode::ArityError);
  CHECK(e.pos().line == 2);

  e = parse_error("var x[2]\nvar y[3]\nminimize sum(x + y)\n");
  CHECK(e.code() == ErrorCode::ShapeMismatch);

  e = parse_error("var x\nminimize x * x\n");
  CHECK(e.code() == ErrorCode::NonAffineProduct);

  e = parse_error("var x\nminimize x +\n");
  CHECK(e.code() == ErrorCode::ParseError);
  CHECK(e.pos().line == 3);

  e = parse_error("var x\nvar x\nminimize x\n");
  CHECK(e.code() == ErrorCode::ParseError);
  CHECK(e.pos() == SourcePos{2, 1});

  e = parse_error("const A\nvar x\nminimize x\n");
  CHECK(e.code() == ErrorCode::MissingBinding);

  e = parse_error("param g nonneg\nvar x\nminimize g * x\ndata\n  g = -1\n");
  CHECK(e.code() == ErrorCode::SignViolation);
  CHECK(e.pos().line == 5);

  e = parse_error("var x\nminimize x[4]\n");
  CHECK(e.code() == ErrorCode::IndexOutOfRange);

  e = parse_error("var minimize\nminimize 1\n");
  CHECK(e.code() == ErrorCode::ParseError);
}

TEST_CASE("comments and keywords") {
  const LoadedProblem lp = parse_problem_file(
      "# leading comment\nvar x  # trailing\nmaximize -abs(x - 1)\nsubject to\n  x >= -2\n");
  CHECK(lp.problem.sense() == Sense::Maximize);
  CHECK(lp.problem.constraints().size() == 1);
  CHECK(lp.problem.constraints()[0].relation == Relation::Leq);
}

TEST_CASE("value literals") {
  CHECK(parse_value_literal("2.5")(0, 0) == 2.5);
  const Eigen::MatrixXd v = parse_value_literal("[1, -2, 3e-1]");
  CHECK(v.rows() == 3);
  CHECK(v.cols() == 1);
  CHECK(v(2, 0) == 0.3);
  const Eigen::MatrixXd m = parse_value_literal("[1, 2; 3, 4]");
  CHECK(m(1, 0) == 3.0);
  CHECK_THROWS_AS(parse_value_literal("[1, 2; 3]"), Error);
  CHECK_THROWS_AS(parse_value_literal("abc"), Error);
}

TEST_CASE("problem listings transcribe directly") {
  const LoadedProblem box = testing::load_fixture("box_least_squares.dcp");
  CHECK(box.problem.constraints().size() == 2);
  CHECK(to_string(box.problem.objective()) == "sum_squares(A * x - b)");
  const LoadedProblem bare = parse_problem_file("var x\nminimize square(x)\n");
  CHECK(bare.problem.constraints().empty());
}
