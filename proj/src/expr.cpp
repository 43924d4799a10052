#include "dcpx/expr.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <unordered_set>

#include "dcpx/atoms.hpp"
#include "dcpx/error.hpp"

namespace dcpx {

Expr make_node(std::shared_ptr<const detail::Node> node);

namespace {

std::atomic<std::int64_t> g_next_variable_id{0};
std::atomic<std::int64_t> g_next_parameter_id{0};
std::atomic<std::uint64_t> g_next_node_id{0};

const detail::Node& checked(const detail::Node* node) {
  if (node == nullptr) {
    throw Error(ErrorCode::ContractViolation, "use of an empty expression handle");
  }
  return *node;
}

std::shared_ptr<detail::Node> new_node(NodeKind kind, Shape shape) {
  auto node = std::make_shared<detail::Node>();
  node->kind = kind;
  node->shape = shape;
  node->node_id = g_next_node_id.fetch_add(1);
  return node;
}

void require_column(Shape shape, const char* what) {
  if (!shape.is_column()) {
    throw Error(ErrorCode::UnsupportedShape, std::string(what) +
                                                 " must be a scalar or column vector, got " +
                                                 to_string(shape));
  }
}

bool is_factor_leaf(const Expr& e) { return e.is_constant() || e.is_parameter(); }

}  // namespace

Expr make_node(std::shared_ptr<const detail::Node> node) { return Expr(std::move(node)); }

NodeKind Expr::kind() const { return checked(node_.get()).kind; }
Shape Expr::shape() const { return checked(node_.get()).shape; }

AtomKind Expr::atom() const {
  const auto& n = checked(node_.get());
  if (n.kind != NodeKind::Atom) throw Error(ErrorCode::ContractViolation, "not an atom node");
  return n.atom;
}

const std::vector<Expr>& Expr::args() const { return checked(node_.get()).args; }
int Expr::index() const { return checked(node_.get()).index; }
std::int64_t Expr::id() const { return checked(node_.get()).decl_id; }
std::uint64_t Expr::node_id() const { return checked(node_.get()).node_id; }
const std::string& Expr::name() const { return checked(node_.get()).name; }
Sign Expr::declared_sign() const { return checked(node_.get()).sign; }
const Eigen::MatrixXd& Expr::value() const { return checked(node_.get()).value; }
bool Expr::is_variable_free() const { return !checked(node_.get()).has_variables; }
bool Expr::is_parameter_free() const { return !checked(node_.get()).has_parameters; }

Expr make_variable(Shape shape, std::string name) {
  require_column(shape, "variables");
  auto node = new_node(NodeKind::Variable, shape);
  node->decl_id = g_next_variable_id.fetch_add(1);
  node->name = std::move(name);
  node->has_variables = true;
  return make_node(std::move(node));
}

Expr make_variable(int n, std::string name) { return make_variable(Shape::vector(n), std::move(name)); }

Expr make_parameter(Shape shape, Sign sign, std::string name) {
  require_column(shape, "parameters");
  auto node = new_node(NodeKind::Parameter, shape);
  node->decl_id = g_next_parameter_id.fetch_add(1);
  node->name = std::move(name);
  node->sign = sign;
  node->has_parameters = true;
  return make_node(std::move(node));
}

Expr make_parameter(int n, Sign sign, std::string name) {
  return make_parameter(Shape::vector(n), sign, std::move(name));
}

Expr make_constant(Eigen::MatrixXd values, std::string name) {
  if (values.size() == 0) {
    throw Error(ErrorCode::UnsupportedShape, "constants must have at least one entry");
  }
  if (!values.allFinite()) {
    throw Error(ErrorCode::NonFiniteValue, "constant has non-finite entries");
  }
  auto node = new_node(NodeKind::Constant,
                       Shape(static_cast<int>(values.rows()), static_cast<int>(values.cols())));
  node->sign = make_sign((values.array() >= 0.0).all(), (values.array() <= 0.0).all());
  node->value = std::move(values);
  node->name = std::move(name);
  return make_node(std::move(node));
}

Expr make_constant(double value) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = value;
  return make_constant(std::move(m));
}

Expr apply_atom(AtomKind kind, std::vector<Expr> args, int index) {
  const AtomMeta& meta = atom_meta(kind);
  const int n = static_cast<int>(args.size());
  if (n < meta.min_arity || (meta.max_arity >= 0 && n > meta.max_arity)) {
    throw Error(ErrorCode::ArityError, std::string(meta.name) + " does not accept " +
                                           std::to_string(n) + " argument(s)");
  }
  for (const Expr& a : args) {
    if (!a.valid()) throw Error(ErrorCode::ContractViolation, "empty argument expression");
  }
  if (kind == AtomKind::Scale) {
    if (!is_factor_leaf(args[0])) {
      if (!is_factor_leaf(args[1])) {
        throw Error(ErrorCode::NonAffineProduct,
                    "products need a constant or parameter factor: " + to_string(args[0]) +
                        " * " + to_string(args[1]));
      }
      std::swap(args[0], args[1]);
    }
  }
  std::vector<Shape> shapes;
  shapes.reserve(args.size());
  for (const Expr& a : args) shapes.push_back(a.shape());
  Shape shape = meta.shape_rule(shapes, index);

  auto node = new_node(NodeKind::Atom, shape);
  node->atom = kind;
  node->index = kind == AtomKind::Index ? index : -1;
  for (const Expr& a : args) {
    node->has_variables = node->has_variables || !a.is_variable_free();
    node->has_parameters = node->has_parameters || !a.is_parameter_free();
  }
  node->args = std::move(args);
  return make_node(std::move(node));
}

Expr operator+(const Expr& a, const Expr& b) { return apply_atom(AtomKind::Add, {a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
Expr operator-(const Expr& a) { return apply_atom(AtomKind::Negate, {a}); }
Expr operator*(const Expr& a, const Expr& b) { return apply_atom(AtomKind::Scale, {a, b}); }
Expr operator+(const Expr& a, double b) { return a + make_constant(b); }
Expr operator+(double a, const Expr& b) { return make_constant(a) + b; }
Expr operator-(const Expr& a, double b) { return a - make_constant(b); }
Expr operator-(double a, const Expr& b) { return make_constant(a) - b; }
Expr operator*(double a, const Expr& b) { return make_constant(a) * b; }
Expr operator*(const Expr& a, double b) { return a * make_constant(b); }

Expr sum(const Expr& x) { return apply_atom(AtomKind::Sum, {x}); }
Expr index(const Expr& x, int i) { return apply_atom(AtomKind::Index, {x}, i); }
Expr abs(const Expr& x) { return apply_atom(AtomKind::Abs, {x}); }
Expr square(const Expr& x) { return apply_atom(AtomKind::Square, {x}); }
Expr sum_squares(const Expr& x) { return apply_atom(AtomKind::SumSquares, {x}); }
Expr norm1(const Expr& x) { return apply_atom(AtomKind::Norm1, {x}); }
Expr norm2(const Expr& x) { return apply_atom(AtomKind::Norm2, {x}); }
Expr norm_inf(const Expr& x) { return apply_atom(AtomKind::NormInf, {x}); }
Expr pos(const Expr& x) { return apply_atom(AtomKind::Pos, {x}); }
Expr maximum(std::vector<Expr> args) { return apply_atom(AtomKind::Maximum, std::move(args)); }
Expr minimum(std::vector<Expr> args) { return apply_atom(AtomKind::Minimum, std::move(args)); }

Expr sum_of(const std::vector<Expr>& terms) {
  if (terms.empty()) throw Error(ErrorCode::ArityError, "sum_of needs at least one term");
  Expr total = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) total = total + terms[i];
  return total;
}

namespace {

std::vector<Expr> collect_leaves(const std::vector<Expr>& roots, NodeKind kind) {
  std::unordered_set<const detail::Node*> seen;
  std::vector<Expr> out;
  std::vector<Expr> stack(roots.rbegin(), roots.rend());
  while (!stack.empty()) {
    Expr e = stack.back();
    stack.pop_back();
    if (!seen.insert(e.get()).second) continue;
    if (e.kind() == kind) out.push_back(e);
    if (e.is_atom()) {
      for (auto it = e.args().rbegin(); it != e.args().rend(); ++it) stack.push_back(*it);
    }
  }
  std::sort(out.begin(), out.end(), [](const Expr& a, const Expr& b) { return a.id() < b.id(); });
  return out;
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_matrix(const Eigen::MatrixXd& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i > 0) s += "; ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) s += ", ";
      s += format_number(m(i, j));
    }
  }
  return s + "]";
}

// 0: sum level, 1: product level, 2: factor level.
int level(const Expr& e) {
  if (!e.is_atom()) return 2;
  switch (e.atom()) {
    case AtomKind::Add: return 0;
    case AtomKind::Scale: return 1;
    default: return 2;
  }
}

std::string print(const Expr& e, int min_level);

std::string print_bare(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Variable:
      return e.name().empty() ? "var" + std::to_string(e.id()) : e.name();
    case NodeKind::Parameter:
      return e.name().empty() ? "param" + std::to_string(e.id()) : e.name();
    case NodeKind::Constant:
      if (!e.name().empty()) return e.name();
      return e.shape().is_scalar() ? format_number(e.value()(0, 0)) : format_matrix(e.value());
    case NodeKind::Atom: break;
  }
  const auto& args = e.args();
  switch (e.atom()) {
    case AtomKind::Add: {
      std::string s = print(args[0], 0);
      for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i].is_atom() && args[i].atom() == AtomKind::Negate) {
          s += " - " + print(args[i].args()[0], 1);
        } else {
          s += " + " + print(args[i], 1);
        }
      }
      return s;
    }
    case AtomKind::Negate: return "-" + print(args[0], 2);
    case AtomKind::Scale: return print(args[0], 2) + " * " + print(args[1], 2);
    case AtomKind::Index: return print(args[0], 2) + "[" + std::to_string(e.index()) + "]";
    default: {
      std::string s(atom_name(e.atom()));
      s += "(";
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i > 0) s += ", ";
        s += print(args[i], 0);
      }
      return s + ")";
    }
  }
}

std::string print(const Expr& e, int min_level) {
  std::string s = print_bare(e);
  return level(e) < min_level ? "(" + s + ")" : s;
}

}  // namespace

std::vector<Expr> collect_variables(const std::vector<Expr>& roots) {
  return collect_leaves(roots, NodeKind::Variable);
}

std::vector<Expr> collect_parameters(const std::vector<Expr>& roots) {
  return collect_leaves(roots, NodeKind::Parameter);
}

std::string to_string(const Expr& expr) {
  if (!expr.valid()) return "<empty>";
  return print(expr, 0);
}

}  // namespace dcpx
