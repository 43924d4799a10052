#include "dcpx/syntax.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <set>

#include "dcpx/atoms.hpp"

namespace dcpx {

namespace {

std::string at(SourcePos pos, const std::string& message) {
  return std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + message;
}

const std::set<std::string, std::less<>> kKeywords = {
    "var", "param", "const", "minimize", "maximize", "subject", "to",
    "data", "nonneg", "nonpos", "zero"};

std::optional<AtomKind> callable_atom(std::string_view name) {
  auto kind = atom_from_name(name);
  if (!kind) return std::nullopt;
  switch (*kind) {
    case AtomKind::Add:
    case AtomKind::Negate:
    case AtomKind::Scale:
    case AtomKind::Index: return std::nullopt;
    default: return kind;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Number, Ident, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  SourcePos pos;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  SourcePos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++pos.line;
        pos.col = 1;
      } else {
        ++pos.col;
      }
    }
  };
  while (i < src.size()) {
    const char ch = src[i];
    if (ch == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    Token t;
    t.pos = pos;
    if (std::isdigit(static_cast<unsigned char>(ch)) ||
        (ch == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.kind = Tok::Number;
      t.text = std::string(src.substr(i, j - i));
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
        throw SourceError(ErrorCode::ParseError, pos, "malformed number '" + t.text + "'");
      }
      advance(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      static const char* two[] = {"<=", ">=", "=="};
      t.kind = Tok::Punct;
      for (const char* op : two) {
        if (src.substr(i, 2) == op) t.text = op;
      }
      if (t.text.empty()) {
        if (std::string_view("[](),;=+-*").find(ch) == std::string_view::npos) {
          throw SourceError(ErrorCode::ParseError, pos,
                            std::string("unexpected character '") + ch + "'");
        }
        t.text = std::string(1, ch);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = pos;
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  ProblemFile problem() {
    ProblemFile file;
    while (is_ident("var") || is_ident("param") || is_ident("const")) {
      file.declarations.push_back(declaration());
    }
    if (is_ident("minimize")) {
      file.sense = Sense::Minimize;
    } else if (is_ident("maximize")) {
      file.sense = Sense::Maximize;
    } else {
      fail("expected a declaration, 'minimize' or 'maximize'");
    }
    next();
    file.objective = expr();
    if (is_ident("subject")) {
      next();
      expect_ident("to");
      do {
        file.constraints.push_back(constraint());
      } while (peek().kind != Tok::End && !is_ident("data"));
    }
    if (is_ident("data")) {
      next();
      do {
        file.data.push_back(binding());
      } while (peek().kind != Tok::End);
    }
    if (peek().kind != Tok::End) fail("unexpected " + describe(peek()));
    return file;
  }

  SyntaxPtr standalone_expr() {
    SyntaxPtr e = expr();
    if (peek().kind != Tok::End) fail("unexpected " + describe(peek()));
    return e;
  }

  DataBinding standalone_literal() {
    DataBinding b;
    b.pos = peek().pos;
    literal(b);
    if (peek().kind != Tok::End) fail("unexpected " + describe(peek()));
    return b;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is_ident(std::string_view s) const {
    return peek().kind == Tok::Ident && peek().text == s;
  }
  bool is_punct(std::string_view s) const {
    return peek().kind == Tok::Punct && peek().text == s;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::Number: return "number '" + t.text + "'";
      default: return "'" + t.text + "'";
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SourceError(ErrorCode::ParseError, peek().pos, msg);
  }

  void expect_punct(std::string_view s) {
    if (!is_punct(s)) fail("expected '" + std::string(s) + "', got " + describe(peek()));
    next();
  }

  void expect_ident(std::string_view s) {
    if (!is_ident(s)) fail("expected '" + std::string(s) + "', got " + describe(peek()));
    next();
  }

  std::string name(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what + ", got " + describe(peek()));
    if (kKeywords.count(peek().text)) fail("'" + peek().text + "' is a reserved word");
    return next().text;
  }

  int integer() {
    const Token& t = peek();
    if (t.kind != Tok::Number) fail("expected an integer, got " + describe(t));
    int v = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) {
      fail("expected an integer, got " + describe(t));
    }
    next();
    return v;
  }

  Declaration declaration() {
    Declaration d;
    d.pos = peek().pos;
    const std::string kw = next().text;
    d.kind = kw == "var" ? DeclKind::Var : kw == "param" ? DeclKind::Param : DeclKind::Const;
    d.name = name("a name");
    if (d.kind != DeclKind::Const && is_punct("[")) {
      next();
      const SourcePos size_pos = peek().pos;
      d.size = integer();
      if (*d.size < 1) throw SourceError(ErrorCode::UnsupportedShape, size_pos, "size must be at least 1");
      expect_punct("]");
    }
    if (d.kind == DeclKind::Param) {
      if (is_ident("nonneg")) d.sign = Sign::Nonneg;
      if (is_ident("nonpos")) d.sign = Sign::Nonpos;
      if (is_ident("zero")) d.sign = Sign::Zero;
      if (d.sign) next();
    }
    return d;
  }

  SyntaxConstraint constraint() {
    SyntaxConstraint c;
    c.pos = peek().pos;
    c.lhs = expr();
    if (!(is_punct("<=") || is_punct(">=") || is_punct("=="))) {
      fail("expected '<=', '>=' or '==', got " + describe(peek()));
    }
    c.op = next().text;
    c.rhs = expr();
    return c;
  }

  static SyntaxPtr node(SyntaxNode n) { return std::make_shared<const SyntaxNode>(std::move(n)); }

  SyntaxPtr expr() {
    SyntaxPtr lhs = term();
    while (is_punct("+") || is_punct("-")) {
      SyntaxNode n;
      n.pos = peek().pos;
      n.kind = next().text == "+" ? SyntaxKind::Add : SyntaxKind::Subtract;
      n.children = {lhs, term()};
      lhs = node(std::move(n));
    }
    return lhs;
  }

  SyntaxPtr term() {
    SyntaxPtr lhs = factor();
    if (is_punct("*")) {
      SyntaxNode n;
      n.pos = next().pos;
      n.kind = SyntaxKind::Multiply;
      n.children = {lhs, factor()};
      return node(std::move(n));
    }
    return lhs;
  }

  SyntaxPtr factor() {
    SyntaxNode n;
    n.pos = peek().pos;
    if (peek().kind == Tok::Number) {
      n.kind = SyntaxKind::Number;
      n.number = next().number;
      return node(std::move(n));
    }
    if (is_punct("-")) {
      next();
      n.kind = SyntaxKind::Negate;
      n.children = {factor()};
      return node(std::move(n));
    }
    if (is_punct("(")) {
      next();
      SyntaxPtr inner = expr();
      expect_punct(")");
      return inner;
    }
    if (peek().kind != Tok::Ident) fail("expected an expression, got " + describe(peek()));
    const std::string id = peek().text;
    if (toks_[pos_ + 1].kind == Tok::Punct && toks_[pos_ + 1].text == "(") {
      if (!callable_atom(id)) {
        throw SourceError(ErrorCode::UnknownAtom, n.pos, "unknown atom '" + id + "'");
      }
      next();
      next();
      n.kind = SyntaxKind::Call;
      n.name = id;
      n.children.push_back(expr());
      while (is_punct(",")) {
        next();
        n.children.push_back(expr());
      }
      expect_punct(")");
      return node(std::move(n));
    }
    n.name = name("an expression");
    if (is_punct("[")) {
      next();
      n.kind = SyntaxKind::IndexRef;
      n.index = integer();
      expect_punct("]");
    } else {
      n.kind = SyntaxKind::Name;
    }
    return node(std::move(n));
  }

  double signed_number() {
    bool neg = false;
    if (is_punct("-")) {
      next();
      neg = true;
    }
    if (peek().kind != Tok::Number) fail("expected a number, got " + describe(peek()));
    const double v = next().number;
    return neg ? -v : v;
  }

  void literal(DataBinding& b) {
    if (!is_punct("[")) {
      b.form = LiteralForm::Scalar;
      b.rows = {{signed_number()}};
      return;
    }
    next();
    b.rows.emplace_back();
    b.rows.back().push_back(signed_number());
    b.form = LiteralForm::List;
    while (is_punct(",") || is_punct(";")) {
      if (next().text == ";") {
        b.form = LiteralForm::Matrix;
        b.rows.emplace_back();
      }
      b.rows.back().push_back(signed_number());
    }
    expect_punct("]");
    for (const auto& row : b.rows) {
      if (row.size() != b.rows.front().size()) {
        throw SourceError(ErrorCode::ShapeMismatch, b.pos, "matrix rows have different lengths");
      }
    }
  }

  DataBinding binding() {
    DataBinding b;
    b.pos = peek().pos;
    b.name = name("a data name");
    expect_punct("=");
    literal(b);
    return b;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer

int level(const SyntaxNode& n) {
  switch (n.kind) {
    case SyntaxKind::Add:
    case SyntaxKind::Subtract: return 0;
    case SyntaxKind::Multiply: return 1;
    default: return 2;
  }
}

std::string print_at(const SyntaxNode& n, int min_level) {
  std::string s = print_syntax(n);
  return level(n) < min_level ? "(" + s + ")" : s;
}

std::string print_literal(const DataBinding& b) {
  if (b.form == LiteralForm::Scalar) return format_number(b.rows[0][0]);
  std::string s = "[";
  for (std::size_t i = 0; i < b.rows.size(); ++i) {
    if (i > 0) s += "; ";
    for (std::size_t j = 0; j < b.rows[i].size(); ++j) {
      if (j > 0) s += ", ";
      s += format_number(b.rows[i][j]);
    }
  }
  return s + "]";
}

bool same_ptr(const SyntaxPtr& a, const SyntaxPtr& b) {
  if (!a || !b) return !a && !b;
  return same_structure(*a, *b);
}

// ---------------------------------------------------------------------------
// Builder

class Builder {
 public:
  explicit Builder(const std::map<std::string, Expr>& symbols) : symbols_(symbols) {}

  Expr build(const SyntaxNode& n) {
    try {
      return build_inner(n);
    } catch (const SourceError&) {
      throw;
    } catch (const Error& e) {
      throw SourceError(e.code(), n.pos, e.what());
    }
  }

 private:
  Expr lookup(const SyntaxNode& n) {
    auto it = symbols_.find(n.name);
    if (it == symbols_.end()) {
      throw SourceError(ErrorCode::UndeclaredIdentifier, n.pos,
                        "undeclared identifier '" + n.name + "'");
    }
    return it->second;
  }

  Expr build_inner(const SyntaxNode& n) {
    switch (n.kind) {
      case SyntaxKind::Number: return make_constant(n.number);
      case SyntaxKind::Name: return lookup(n);
      case SyntaxKind::IndexRef: return index(lookup(n), n.index);
      case SyntaxKind::Call: {
        std::vector<Expr> args;
        for (const SyntaxPtr& c : n.children) args.push_back(build(*c));
        return apply_atom(*callable_atom(n.name), std::move(args));
      }
      case SyntaxKind::Negate: {
        const SyntaxNode& c = *n.children[0];
        if (c.kind == SyntaxKind::Number) return make_constant(-c.number);
        return -build(c);
      }
      case SyntaxKind::Add: return build(*n.children[0]) + build(*n.children[1]);
      case SyntaxKind::Subtract: return build(*n.children[0]) - build(*n.children[1]);
      case SyntaxKind::Multiply: return build(*n.children[0]) * build(*n.children[1]);
    }
    throw SourceError(ErrorCode::ParseError, n.pos, "unhandled syntax node");
  }

  const std::map<std::string, Expr>& symbols_;
};

}  // namespace

SourceError::SourceError(ErrorCode code, SourcePos pos, const std::string& message)
    : Error(code, at(pos, message)), pos_(pos), detail_(at(pos, message)) {}

Eigen::MatrixXd DataBinding::matrix() const {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = static_cast<Eigen::Index>(rows.front().size());
  if (form == LiteralForm::List) {
    Eigen::MatrixXd m(c, 1);
    for (Eigen::Index i = 0; i < c; ++i) m(i, 0) = rows[0][static_cast<std::size_t>(i)];
    return m;
  }
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return m;
}

ProblemFile parse_problem_syntax(std::string_view text) { return Parser(text).problem(); }

std::string print_syntax(const SyntaxNode& n) {
  switch (n.kind) {
    case SyntaxKind::Number: return format_number(n.number);
    case SyntaxKind::Name: return n.name;
    case SyntaxKind::IndexRef: return n.name + "[" + std::to_string(n.index) + "]";
    case SyntaxKind::Call: {
      std::string s = n.name + "(";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i > 0) s += ", ";
        s += print_syntax(*n.children[i]);
      }
      return s + ")";
    }
    case SyntaxKind::Negate: return "-" + print_at(*n.children[0], 2);
    case SyntaxKind::Add:
    case SyntaxKind::Subtract:
      return print_at(*n.children[0], 0) + (n.kind == SyntaxKind::Add ? " + " : " - ") +
             print_at(*n.children[1], 1);
    case SyntaxKind::Multiply:
      return print_at(*n.children[0], 2) + " * " + print_at(*n.children[1], 2);
  }
  return "";
}

std::string print_problem(const ProblemFile& file) {
  std::string s;
  for (const Declaration& d : file.declarations) {
    s += d.kind == DeclKind::Var ? "var " : d.kind == DeclKind::Param ? "param " : "const ";
    s += d.name;
    if (d.size) s += "[" + std::to_string(*d.size) + "]";
    if (d.sign) s += std::string(" ") + to_string(*d.sign);
    s += "\n";
  }
  s += std::string(to_string(file.sense)) + " " + print_syntax(*file.objective) + "\n";
  if (!file.constraints.empty()) {
    s += "subject to\n";
    for (const SyntaxConstraint& c : file.constraints) {
      s += "  " + print_syntax(*c.lhs) + " " + c.op + " " + print_syntax(*c.rhs) + "\n";
    }
  }
  if (!file.data.empty()) {
    s += "data\n";
    for (const DataBinding& b : file.data) s += "  " + b.name + " = " + print_literal(b) + "\n";
  }
  return s;
}

bool same_structure(const SyntaxNode& a, const SyntaxNode& b) {
  if (a.kind != b.kind || a.name != b.name || a.index != b.index ||
      a.children.size() != b.children.size()) {
    return false;
  }
  if (a.kind == SyntaxKind::Number &&
      std::bit_cast<std::uint64_t>(a.number) != std::bit_cast<std::uint64_t>(b.number)) {
    return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_structure(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

bool same_structure(const ProblemFile& a, const ProblemFile& b) {
  if (a.sense != b.sense || !same_ptr(a.objective, b.objective)) return false;
  if (a.declarations.size() != b.declarations.size() ||
      a.constraints.size() != b.constraints.size() || a.data.size() != b.data.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.declarations.size(); ++i) {
    const Declaration& x = a.declarations[i];
    const Declaration& y = b.declarations[i];
    if (x.kind != y.kind || x.name != y.name || x.size != y.size || x.sign != y.sign) return false;
  }
  for (std::size_t i = 0; i < a.constraints.size(); ++i) {
    const SyntaxConstraint& x = a.constraints[i];
    const SyntaxConstraint& y = b.constraints[i];
    if (x.op != y.op || !same_ptr(x.lhs, y.lhs) || !same_ptr(x.rhs, y.rhs)) return false;
  }
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const DataBinding& x = a.data[i];
    const DataBinding& y = b.data[i];
    if (x.name != y.name || x.form != y.form || x.rows != y.rows) return false;
  }
  return true;
}

LoadedProblem parse_problem_file(std::string_view text) {
  ProblemFile file = parse_problem_syntax(text);

  std::map<std::string, const DataBinding*> data;
  for (const DataBinding& b : file.data) {
    if (!data.emplace(b.name, &b).second) {
      throw SourceError(ErrorCode::ParseError, b.pos, "duplicate data for '" + b.name + "'");
    }
  }

  std::map<std::string, Expr> symbols;
  std::vector<Expr> variables;
  std::vector<Expr> parameters;
  ParamBinding defaults;
  for (const Declaration& d : file.declarations) {
    if (symbols.count(d.name)) {
      throw SourceError(ErrorCode::ParseError, d.pos, "'" + d.name + "' is declared twice");
    }
    auto found = data.find(d.name);
    const DataBinding* value = found == data.end() ? nullptr : found->second;
    Expr e;
    try {
      switch (d.kind) {
        case DeclKind::Var:
          if (value) {
            throw SourceError(ErrorCode::ParseError, value->pos,
                              "data given for variable '" + d.name + "'");
          }
          e = make_variable(d.size.value_or(1), d.name);
          variables.push_back(e);
          break;
        case DeclKind::Param:
          e = make_parameter(d.size.value_or(1), d.sign.value_or(Sign::Unknown), d.name);
          parameters.push_back(e);
          if (value) {
            const Eigen::MatrixXd m = value->matrix();
            if (m.cols() != 1 || m.rows() != e.size()) {
              throw SourceError(ErrorCode::ShapeMismatch, value->pos,
                                "data for '" + d.name + "' has shape " +
                                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                    ", expected " + to_string(e.shape()));
            }
            Eigen::VectorXd v = m.col(0);
            defaults.set(e, v);
            try {
              bound_value(e, defaults);
            } catch (const Error& err) {
              throw SourceError(err.code(), value->pos, err.what());
            }
          }
          break;
        case DeclKind::Const:
          if (!value) {
            throw SourceError(ErrorCode::MissingBinding, d.pos,
                              "constant '" + d.name + "' has no data");
          }
          e = make_constant(value->matrix(), d.name);
          break;
      }
    } catch (const SourceError&) {
      throw;
    } catch (const Error& err) {
      throw SourceError(err.code(), d.pos, err.what());
    }
    symbols.emplace(d.name, e);
  }
  for (const DataBinding& b : file.data) {
    if (!symbols.count(b.name)) {
      throw SourceError(ErrorCode::UndeclaredIdentifier, b.pos,
                        "data for undeclared name '" + b.name + "'");
    }
  }

  Builder builder(symbols);
  Expr objective = builder.build(*file.objective);
  std::vector<Constraint> constraints;
  for (const SyntaxConstraint& c : file.constraints) {
    Expr lhs = builder.build(*c.lhs);
    Expr rhs = builder.build(*c.rhs);
    try {
      if (c.op == "<=") {
        constraints.push_back(make_constraint(lhs, Relation::Leq, rhs));
      } else if (c.op == ">=") {
        constraints.push_back(make_ge_constraint(lhs, rhs));
      } else {
        constraints.push_back(make_constraint(lhs, Relation::Eq, rhs));
      }
    } catch (const Error& err) {
      throw SourceError(err.code(), c.pos, err.what());
    }
  }
  std::optional<Problem> problem;
  try {
    problem.emplace(file.sense, objective, std::move(constraints));
  } catch (const Error& err) {
    throw SourceError(err.code(), file.objective->pos, err.what());
  }
  return LoadedProblem{std::move(file), std::move(*problem), std::move(defaults),
                       std::move(symbols), std::move(variables), std::move(parameters)};
}

Expr parse_expression(std::string_view text, const std::map<std::string, Expr>& symbols) {
  SyntaxPtr e = Parser(text).standalone_expr();
  return Builder(symbols).build(*e);
}

Eigen::MatrixXd parse_value_literal(std::string_view text) {
  return Parser(text).standalone_literal().matrix();
}

}  // namespace dcpx
