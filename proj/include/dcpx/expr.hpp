#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcpx/lattice.hpp"
#include "dcpx/shape.hpp"

namespace dcpx {

enum class NodeKind { Variable, Parameter, Constant, Atom };

// The closed atom library. `Scale` multiplies by a constant or parameter leaf
// (scalar scaling or a matrix-vector product); `Index` carries its position as
// node payload.
enum class AtomKind {
  Add,
  Negate,
  Scale,
  Sum,
  Index,
  Abs,
  Square,
  SumSquares,
  Norm1,
  Norm2,
  NormInf,
  Pos,
  Maximum,
  Minimum,
};

namespace detail {
struct Node;
}

// Handle to an immutable expression node. Copies share the node, so an
// expression can appear in any number of problems and be read from many
// threads at once.
class Expr {
 public:
  Expr() = default;

  bool valid() const { return node_ != nullptr; }

  NodeKind kind() const;
  Shape shape() const;
  int size() const { return shape().size(); }

  // Atom nodes only.
  AtomKind atom() const;
  const std::vector<Expr>& args() const;
  int index() const;

  // Creation-ordered declaration id (variables and parameters; -1 otherwise).
  std::int64_t id() const;
  // Creation-ordered id unique across every node in the process.
  std::uint64_t node_id() const;
  const std::string& name() const;

  // Parameters: declared sign. Constants: sign computed from the entries.
  Sign declared_sign() const;
  // Constants only.
  const Eigen::MatrixXd& value() const;

  bool is_variable() const { return kind() == NodeKind::Variable; }
  bool is_parameter() const { return kind() == NodeKind::Parameter; }
  bool is_constant() const { return kind() == NodeKind::Constant; }
  bool is_atom() const { return kind() == NodeKind::Atom; }

  // True if no variable is reachable from this node.
  bool is_variable_free() const;
  // True if no parameter is reachable from this node.
  bool is_parameter_free() const;

  const detail::Node* get() const { return node_.get(); }

 private:
  friend Expr make_node(std::shared_ptr<const detail::Node> node);
  explicit Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const detail::Node> node_;
};

namespace detail {
struct Node {
  NodeKind kind = NodeKind::Constant;
  AtomKind atom = AtomKind::Add;
  Shape shape;
  std::vector<Expr> args;
  std::int64_t decl_id = -1;
  std::uint64_t node_id = 0;
  std::string name;
  Sign sign = Sign::Unknown;
  Eigen::MatrixXd value;
  int index = -1;
  bool has_variables = false;
  bool has_parameters = false;
};
}  // namespace detail

Expr make_variable(Shape shape, std::string name = {});
Expr make_variable(int n = 1, std::string name = {});
Expr make_parameter(Shape shape, Sign sign = Sign::Unknown, std::string name = {});
Expr make_parameter(int n = 1, Sign sign = Sign::Unknown, std::string name = {});
Expr make_constant(Eigen::MatrixXd values, std::string name = {});
Expr make_constant(double value);

// Builds an atom node after checking arity and shape rules. `index` is only
// read for AtomKind::Index. For Scale, one of the two arguments must be a
// constant or parameter leaf; it is moved to the front.
Expr apply_atom(AtomKind kind, std::vector<Expr> args, int index = -1);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator+(const Expr& a, double b);
Expr operator+(double a, const Expr& b);
Expr operator-(const Expr& a, double b);
Expr operator-(double a, const Expr& b);
Expr operator*(double a, const Expr& b);
Expr operator*(const Expr& a, double b);

Expr sum(const Expr& x);
Expr index(const Expr& x, int i);
Expr abs(const Expr& x);
Expr square(const Expr& x);
Expr sum_squares(const Expr& x);
Expr norm1(const Expr& x);
Expr norm2(const Expr& x);
Expr norm_inf(const Expr& x);
Expr pos(const Expr& x);
Expr maximum(std::vector<Expr> args);
Expr minimum(std::vector<Expr> args);

// Adds a non-empty list of expressions left to right.
Expr sum_of(const std::vector<Expr>& terms);

// Every distinct variable (resp. parameter) leaf reachable from `roots`,
// ordered by declaration id.
std::vector<Expr> collect_variables(const std::vector<Expr>& roots);
std::vector<Expr> collect_parameters(const std::vector<Expr>& roots);

// Display form: leaves print their name, atoms use operator/function syntax.
std::string to_string(const Expr& expr);

}  // namespace dcpx
