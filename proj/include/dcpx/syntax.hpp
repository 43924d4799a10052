#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dcpx/binding.hpp"
#include "dcpx/error.hpp"
#include "dcpx/expr.hpp"
#include "dcpx/problem.hpp"

namespace dcpx {

// Problem-file language:
//
//   problem    := decl* ("minimize"|"maximize") expr
//                 ("subject" "to" constraint+)? ("data" binding+)?
//   decl       := "var" IDENT ("[" INT "]")?
//               | "param" IDENT ("[" INT "]")? ("nonneg"|"nonpos"|"zero")?
//               | "const" IDENT
//   constraint := expr ("<="|">="|"==") expr
//   expr       := term (("+"|"-") term)*
//   term       := factor ("*" factor)?
//   factor     := NUMBER | IDENT | IDENT "[" INT "]"
//               | ATOM "(" expr ("," expr)* ")" | "-" factor | "(" expr ")"
//   binding    := IDENT "=" (NUMBER | "[" NUMBER ("," NUMBER)* "]"
//                            | "[" row (";" row)* "]")
//
// `#` starts a comment that runs to the end of the line.

struct SourcePos {
  int line = 1;
  int col = 1;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

// Error tied to a location in the source text.
class SourceError : public Error {
 public:
  SourceError(ErrorCode code, SourcePos pos, const std::string& message);
  SourcePos pos() const { return pos_; }
  // "line:col: message"
  const std::string& detail() const { return detail_; }

 private:
  SourcePos pos_;
  std::string detail_;
};

enum class SyntaxKind { Number, Name, IndexRef, Call, Negate, Add, Subtract, Multiply };

struct SyntaxNode;
using SyntaxPtr = std::shared_ptr<const SyntaxNode>;

struct SyntaxNode {
  SyntaxKind kind = SyntaxKind::Number;
  double number = 0.0;
  std::string name;  // identifier or atom name
  int index = 0;     // IndexRef
  std::vector<SyntaxPtr> children;
  SourcePos pos;
};

enum class DeclKind { Var, Param, Const };

struct Declaration {
  DeclKind kind = DeclKind::Var;
  std::string name;
  std::optional<int> size;
  std::optional<Sign> sign;
  SourcePos pos;
};

struct SyntaxConstraint {
  SyntaxPtr lhs;
  std::string op;
  SyntaxPtr rhs;
  SourcePos pos;
};

// Scalar `3`, list `[1, 2]` (a column vector) or matrix `[1, 2; 3, 4]`.
enum class LiteralForm { Scalar, List, Matrix };

struct DataBinding {
  std::string name;
  LiteralForm form = LiteralForm::Scalar;
  std::vector<std::vector<double>> rows;
  SourcePos pos;

  Eigen::MatrixXd matrix() const;
};

struct ProblemFile {
  std::vector<Declaration> declarations;
  Sense sense = Sense::Minimize;
  SyntaxPtr objective;
  std::vector<SyntaxConstraint> constraints;
  std::vector<DataBinding> data;
};

// Syntax only; throws SourceError (ParseError, UnknownAtom).
ProblemFile parse_problem_syntax(std::string_view text);

// Canonical text of a problem file; parsing it gives a structurally equal file.
std::string print_problem(const ProblemFile& file);
std::string print_syntax(const SyntaxNode& node);

// Structural equality, ignoring source positions.
bool same_structure(const ProblemFile& a, const ProblemFile& b);
bool same_structure(const SyntaxNode& a, const SyntaxNode& b);

struct LoadedProblem {
  ProblemFile syntax;
  Problem problem;
  // Parameter values from the data section.
  ParamBinding defaults;
  std::map<std::string, Expr> symbols;
  // Declaration order.
  std::vector<Expr> variables;
  std::vector<Expr> parameters;
};

// Parses and builds the problem. Every error carries a source position.
LoadedProblem parse_problem_file(std::string_view text);

// Parses a standalone expression against an existing symbol table.
Expr parse_expression(std::string_view text, const std::map<std::string, Expr>& symbols);

// Numeric literal accepted by data bindings and `--param name=value` flags.
Eigen::MatrixXd parse_value_literal(std::string_view text);

}  // namespace dcpx
