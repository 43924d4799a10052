#include <unordered_map>

#include "dcpx/binding.hpp"
#include "dcpx/error.hpp"

namespace dcpx {

ParamBinding& ParamBinding::set(const Expr& param, double value) {
  return set(param, Eigen::VectorXd::Constant(1, value));
}

ParamBinding& ParamBinding::set(const Expr& param, Eigen::VectorXd value) {
  if (!param.is_parameter()) {
    throw Error(ErrorCode::ContractViolation, "binding target is not a parameter");
  }
  return set(param.id(), std::move(value));
}

ParamBinding& ParamBinding::set(std::int64_t id, Eigen::VectorXd value) {
  values_[id] = std::move(value);
  return *this;
}

const Eigen::VectorXd* ParamBinding::find(std::int64_t id) const {
  auto it = values_.find(id);
  return it == values_.end() ? nullptr : &it->second;
}

namespace {

std::string leaf_label(const Expr& e) {
  if (!e.name().empty()) return "'" + e.name() + "'";
  return (e.is_variable() ? "variable #" : "parameter #") + std::to_string(e.id());
}

bool satisfies(Sign declared, const Eigen::VectorXd& v) {
  switch (declared) {
    case Sign::Zero: return (v.array() == 0.0).all();
    case Sign::Nonneg: return (v.array() >= 0.0).all();
    case Sign::Nonpos: return (v.array() <= 0.0).all();
    case Sign::Unknown: return true;
  }
  return true;
}

Eigen::MatrixXd broadcast_to(const Eigen::MatrixXd& m, const Shape& shape) {
  if (m.rows() == shape.rows() && m.cols() == shape.cols()) return m;
  return Eigen::MatrixXd::Constant(shape.rows(), shape.cols(), m(0, 0));
}

class Evaluator {
 public:
  Evaluator(const VarValues& vars, const ParamBinding& params) : vars_(vars), params_(params) {}

  const Eigen::MatrixXd& eval(const Expr& e) {
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second;
    Eigen::MatrixXd v = compute(e);
    return memo_.emplace(e.get(), std::move(v)).first->second;
  }

 private:
  Eigen::MatrixXd compute(const Expr& e) {
    switch (e.kind()) {
      case NodeKind::Constant: return e.value();
      case NodeKind::Parameter: return bound_value(e, params_);
      case NodeKind::Variable: {
        auto it = vars_.find(e.id());
        if (it == vars_.end()) {
          throw Error(ErrorCode::MissingBinding, "no value for " + leaf_label(e));
        }
        if (it->second.size() != e.size()) {
          throw Error(ErrorCode::ShapeMismatch, "value for " + leaf_label(e) + " has length " +
                                                    std::to_string(it->second.size()));
        }
        return it->second;
      }
      case NodeKind::Atom: break;
    }
    const auto& args = e.args();
    const Shape shape = e.shape();
    switch (e.atom()) {
      case AtomKind::Add: {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(shape.rows(), shape.cols());
        for (const Expr& a : args) out += broadcast_to(eval(a), shape);
        return out;
      }
      case AtomKind::Negate: return -eval(args[0]);
      case AtomKind::Scale: {
        const Eigen::MatrixXd& f = eval(args[0]);
        const Eigen::MatrixXd& x = eval(args[1]);
        if (f.size() == 1) return f(0, 0) * x;
        if (x.size() == 1) return f * x(0, 0);
        return f * x;
      }
      case AtomKind::Sum: return Eigen::MatrixXd::Constant(1, 1, eval(args[0]).sum());
      case AtomKind::Index: return Eigen::MatrixXd::Constant(1, 1, eval(args[0])(e.index(), 0));
      case AtomKind::Abs: return eval(args[0]).cwiseAbs();
      case AtomKind::Square: return eval(args[0]).array().square().matrix();
      case AtomKind::SumSquares:
        return Eigen::MatrixXd::Constant(1, 1, eval(args[0]).squaredNorm());
      case AtomKind::Norm1:
        return Eigen::MatrixXd::Constant(1, 1, eval(args[0]).cwiseAbs().sum());
      case AtomKind::Norm2: return Eigen::MatrixXd::Constant(1, 1, eval(args[0]).norm());
      case AtomKind::NormInf:
        return Eigen::MatrixXd::Constant(1, 1, eval(args[0]).cwiseAbs().maxCoeff());
      case AtomKind::Pos: return eval(args[0]).cwiseMax(0.0);
      case AtomKind::Maximum:
      case AtomKind::Minimum: {
        const bool is_max = e.atom() == AtomKind::Maximum;
        Eigen::MatrixXd out = broadcast_to(eval(args[0]), shape);
        for (std::size_t i = 1; i < args.size(); ++i) {
          Eigen::MatrixXd v = broadcast_to(eval(args[i]), shape);
          out = is_max ? Eigen::MatrixXd(out.cwiseMax(v)) : Eigen::MatrixXd(out.cwiseMin(v));
        }
        return out;
      }
    }
    throw Error(ErrorCode::ContractViolation, "unhandled atom in evaluate");
  }

  const VarValues& vars_;
  const ParamBinding& params_;
  std::unordered_map<const detail::Node*, Eigen::MatrixXd> memo_;
};

}  // namespace

const Eigen::VectorXd& bound_value(const Expr& param, const ParamBinding& binding) {
  const Eigen::VectorXd* v = binding.find(param.id());
  if (v == nullptr) {
    throw Error(ErrorCode::MissingBinding, "no value bound for " + leaf_label(param));
  }
  if (v->size() != param.size()) {
    throw Error(ErrorCode::ShapeMismatch, "value for " + leaf_label(param) + " has length " +
                                              std::to_string(v->size()) + ", expected " +
                                              std::to_string(param.size()));
  }
  if (!v->allFinite()) {
    throw Error(ErrorCode::NonFiniteValue, "value for " + leaf_label(param) + " is not finite");
  }
  if (!satisfies(param.declared_sign(), *v)) {
    throw Error(ErrorCode::SignViolation, "value for " + leaf_label(param) +
                                              " contradicts its declared sign " +
                                              to_string(param.declared_sign()));
  }
  return *v;
}

Eigen::MatrixXd evaluate(const Expr& expr, const VarValues& variables, const ParamBinding& params) {
  Evaluator ev(variables, params);
  return ev.eval(expr);
}

double evaluate_scalar(const Expr& expr, const VarValues& variables, const ParamBinding& params) {
  if (!expr.shape().is_scalar()) {
    throw Error(ErrorCode::ShapeMismatch, "expected a scalar expression");
  }
  return evaluate(expr, variables, params)(0, 0);
}

namespace {

Expr freeze(const Expr& e, const ParamBinding& params,
            std::unordered_map<const detail::Node*, Expr>& memo) {
  if (e.is_parameter_free()) return e;
  auto it = memo.find(e.get());
  if (it != memo.end()) return it->second;
  Expr out;
  if (e.is_parameter()) {
    out = make_constant(Eigen::MatrixXd(bound_value(e, params)), e.name());
  } else {
    std::vector<Expr> args;
    args.reserve(e.args().size());
    for (const Expr& a : e.args()) args.push_back(freeze(a, params, memo));
    out = apply_atom(e.atom(), std::move(args), e.index());
  }
  memo.emplace(e.get(), out);
  return out;
}

}  // namespace

Expr freeze_parameters(const Expr& expr, const ParamBinding& params) {
  std::unordered_map<const detail::Node*, Expr> memo;
  return freeze(expr, params, memo);
}

}  // namespace dcpx
