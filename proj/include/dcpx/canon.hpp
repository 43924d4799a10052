#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "dcpx/binding.hpp"
#include "dcpx/cone_program.hpp"
#include "dcpx/dcp.hpp"
#include "dcpx/error.hpp"
#include "dcpx/expr.hpp"
#include "dcpx/problem.hpp"
#include "dcpx/solver.hpp"

namespace dcpx {

// A scalar that is an affine function of the flattened parameter entries.
//
// Parameter-dependent values keep the arithmetic that produced them, so
// evaluating a template replays the same floating-point operations, in the
// same order, as canonicalizing the problem with the parameters frozen to
// constants. Multiplying two parameter-dependent values throws
// NonAffineParameter.
class ParamValue {
 public:
  ParamValue() = default;
  ParamValue(double value) : value_(value) {}  // NOLINT: implicit by design of the arithmetic
  static ParamValue parameter(int slot);

  bool is_constant() const { return tape_ == nullptr; }
  bool is_zero() const { return is_constant() && value_ == 0.0; }
  // Constant part; only meaningful when is_constant().
  double constant() const { return value_; }

  double eval(std::span<const double> slots) const;

  friend ParamValue operator+(const ParamValue& a, const ParamValue& b);
  friend ParamValue operator*(const ParamValue& a, const ParamValue& b);
  friend ParamValue operator-(const ParamValue& a);

 private:
  struct Tape;
  std::shared_ptr<const Tape> tape_;
  double value_ = 0.0;
};

// One scalar entry g(x) = sum_j coeffs[j] * x_j + offset.
struct AffineRow {
  std::map<int, ParamValue> coeffs;
  ParamValue offset;
};

// Vector of affine rows (column-major flattening of `shape`).
struct AffineExpr {
  Shape shape;
  std::vector<AffineRow> rows;
};

enum class ConeKind { Zero, Nonneg, SecondOrder };

// Requires (g_0(x), ..., g_k(x)) to lie in the cone. For SecondOrder the first
// row is the head.
struct ConeConstraint {
  ConeKind kind = ConeKind::Nonneg;
  std::vector<AffineRow> rows;
};

// Epigraph (hypograph for concave atoms) of one atom occurrence: fresh
// auxiliary columns, the affine expression that replaces the atom, and the
// cone constraints tying them to the arguments.
struct GraphImpl {
  int aux_columns = 0;
  AffineExpr substitute;
  std::vector<ConeConstraint> constraints;
};

// Lowers a non-affine atom whose arguments are already affine. Auxiliary
// columns are numbered from `first_aux_column`. Throws ContractViolation for
// affine atoms.
GraphImpl graph_implementation(AtomKind kind, std::span<const AffineExpr> args,
                               Shape result_shape, int first_aux_column);

struct ParamSlot {
  Expr param;
  int offset = 0;
  int size = 0;
};

// Rows owned by one user constraint.
struct ConstraintRows {
  ConeKind cone = ConeKind::Nonneg;
  int first_row = 0;
  int num_rows = 0;
};

// Parameter-affine cone program with a fixed sparsity pattern. Immutable once
// built; stuff() may be called concurrently.
class CanonTemplate {
 public:
  struct Entry {
    int row;
    int col;
    ParamValue value;
  };

  ConeProgram stuff(const ParamBinding& binding) const;

  int num_vars() const { return num_vars_; }
  int num_rows() const { return static_cast<int>(b_.size()); }
  const ConeSpec& cones() const { return cones_; }
  const std::map<std::int64_t, ColumnRange>& var_index() const { return var_index_; }
  const std::vector<Expr>& variables() const { return variables_; }
  const std::vector<ParamSlot>& parameters() const { return parameters_; }
  const std::vector<ConstraintRows>& constraint_rows() const { return constraint_rows_; }
  const DcpVerdict& verdict() const { return verdict_; }
  Sense sense() const { return sense_; }
  const Expr& objective() const { return objective_; }

  // Number of stuff() calls so far.
  std::size_t stuff_count() const { return stuff_count_.load(); }
  // Entries of c, A and b that depend on at least one parameter.
  std::size_t num_parameter_entries() const;

 private:
  friend std::shared_ptr<const CanonTemplate> canonicalize(const Problem& problem);

  int num_vars_ = 0;
  std::vector<std::pair<int, ParamValue>> c_;
  ParamValue offset_;
  std::vector<Entry> a_;
  std::vector<ParamValue> b_;
  ConeSpec cones_;
  std::map<std::int64_t, ColumnRange> var_index_;
  std::vector<Expr> variables_;
  std::vector<ParamSlot> parameters_;
  std::vector<ConstraintRows> constraint_rows_;
  DcpVerdict verdict_;
  Sense sense_ = Sense::Minimize;
  Expr objective_;
  mutable std::atomic<std::size_t> stuff_count_{0};
};

// Thrown by canonicalize (and solve) for problems that fail signed DCP.
class NotDcpError : public Error {
 public:
  explicit NotDcpError(DcpVerdict verdict);
  const DcpVerdict& verdict() const { return verdict_; }

 private:
  DcpVerdict verdict_;
};

// Full canonicalization. Maximize objectives are negated first. Constant
// non-affine subexpressions are folded; parameters stay symbolic.
std::shared_ptr<const CanonTemplate> canonicalize(const Problem& problem);

// Convenience: canonicalize(problem with parameters frozen) -> stuff({}).
ConeProgram canonicalize_frozen(const Problem& problem, const ParamBinding& binding);

struct RecoveredSolution {
  VarValues values;
  // Re-evaluated on the original objective expression.
  double objective = 0.0;
  // Cone dual slice of each user constraint, in constraint order.
  std::vector<Eigen::VectorXd> duals;
};

// Throws StatusMismatch unless the status is Optimal or MaxItersInaccurate.
RecoveredSolution recover_solution(const ConeSolution& solution,
                                   const CanonTemplate& tmpl,
                                   const ParamBinding& binding);

}  // namespace dcpx
