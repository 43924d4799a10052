#pragma once

#include <cstdint>
#include <map>

#include <Eigen/Dense>

#include "dcpx/expr.hpp"

namespace dcpx {

// Values for variables, keyed by declaration id.
using VarValues = std::map<std::int64_t, Eigen::VectorXd>;

// Numeric values for parameters, bound per solve instead of being stored in
// the parameter leaf.
class ParamBinding {
 public:
  ParamBinding& set(const Expr& param, double value);
  ParamBinding& set(const Expr& param, Eigen::VectorXd value);
  ParamBinding& set(std::int64_t id, Eigen::VectorXd value);

  const Eigen::VectorXd* find(std::int64_t id) const;
  bool contains(std::int64_t id) const { return find(id) != nullptr; }
  const std::map<std::int64_t, Eigen::VectorXd>& values() const { return values_; }

 private:
  std::map<std::int64_t, Eigen::VectorXd> values_;
};

// Returns the bound value of `param`, checked against its shape and declared
// sign. Throws MissingBinding, ShapeMismatch or SignViolation.
const Eigen::VectorXd& bound_value(const Expr& param, const ParamBinding& binding);

// Numeric value of `expr` by direct recursive evaluation of every atom.
Eigen::MatrixXd evaluate(const Expr& expr, const VarValues& variables,
                         const ParamBinding& params = {});

// Scalar convenience for scalar-shaped expressions.
double evaluate_scalar(const Expr& expr, const VarValues& variables,
                       const ParamBinding& params = {});

// Copy of `expr` with every parameter replaced by a constant leaf holding its
// bound value.
Expr freeze_parameters(const Expr& expr, const ParamBinding& params);

}  // namespace dcpx
