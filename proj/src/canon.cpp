#include "dcpx/canon.hpp"

#include <algorithm>

#include "dcpx/atoms.hpp"
#include "dcpx/error.hpp"

namespace dcpx {

// ---------------------------------------------------------------------------
// ParamValue

struct ParamValue::Tape {
  enum class Op { Slot, Add, Mul, Neg };
  Op op = Op::Slot;
  int slot = -1;
  ParamValue lhs;
  ParamValue rhs;
};

ParamValue ParamValue::parameter(int slot) {
  ParamValue v;
  v.tape_ = std::make_shared<const Tape>(Tape{Tape::Op::Slot, slot, {}, {}});
  return v;
}

double ParamValue::eval(std::span<const double> slots) const {
  if (!tape_) return value_;
  switch (tape_->op) {
    case Tape::Op::Slot: return slots[static_cast<std::size_t>(tape_->slot)];
    case Tape::Op::Add: return tape_->lhs.eval(slots) + tape_->rhs.eval(slots);
    case Tape::Op::Mul: return tape_->lhs.eval(slots) * tape_->rhs.eval(slots);
    case Tape::Op::Neg: return -tape_->lhs.eval(slots);
  }
  return 0.0;
}

ParamValue operator+(const ParamValue& a, const ParamValue& b) {
  if (a.is_constant() && b.is_constant()) return ParamValue(a.value_ + b.value_);
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  ParamValue v;
  v.tape_ = std::make_shared<const ParamValue::Tape>(
      ParamValue::Tape{ParamValue::Tape::Op::Add, -1, a, b});
  return v;
}

ParamValue operator*(const ParamValue& a, const ParamValue& b) {
  if (a.is_constant() && b.is_constant()) return ParamValue(a.value_ * b.value_);
  if (a.is_zero() || b.is_zero()) return ParamValue(0.0);
  if (!a.is_constant() && !b.is_constant()) {
    throw Error(ErrorCode::NonAffineParameter,
                "a product of two parameter-dependent terms is not affine in the parameters");
  }
  if (a.is_constant() && a.value_ == 1.0) return b;
  if (b.is_constant() && b.value_ == 1.0) return a;
  ParamValue v;
  v.tape_ = std::make_shared<const ParamValue::Tape>(
      ParamValue::Tape{ParamValue::Tape::Op::Mul, -1, a, b});
  return v;
}

ParamValue operator-(const ParamValue& a) {
  if (a.is_constant()) return ParamValue(-a.value_);
  ParamValue v;
  v.tape_ = std::make_shared<const ParamValue::Tape>(
      ParamValue::Tape{ParamValue::Tape::Op::Neg, -1, a, {}});
  return v;
}

// ---------------------------------------------------------------------------
// Affine row arithmetic

namespace {

AffineRow constant_row(ParamValue v) {
  AffineRow r;
  r.offset = std::move(v);
  return r;
}

AffineRow column_row(int col) {
  AffineRow r;
  r.coeffs.emplace(col, ParamValue(1.0));
  return r;
}

AffineRow add_rows(const AffineRow& a, const AffineRow& b) {
  AffineRow out = a;
  for (const auto& [col, v] : b.coeffs) {
    auto it = out.coeffs.find(col);
    if (it == out.coeffs.end()) {
      out.coeffs.emplace(col, v);
    } else {
      ParamValue total = it->second + v;
      if (total.is_zero()) {
        out.coeffs.erase(it);
      } else {
        it->second = std::move(total);
      }
    }
  }
  out.offset = a.offset + b.offset;
  return out;
}

AffineRow negate_row(const AffineRow& a) {
  AffineRow out;
  for (const auto& [col, v] : a.coeffs) out.coeffs.emplace(col, -v);
  out.offset = -a.offset;
  return out;
}

AffineRow scale_row(const ParamValue& f, const AffineRow& a) {
  AffineRow out;
  for (const auto& [col, v] : a.coeffs) {
    ParamValue p = f * v;
    if (!p.is_zero()) out.coeffs.emplace(col, std::move(p));
  }
  out.offset = f * a.offset;
  return out;
}

AffineRow sub_rows(const AffineRow& a, const AffineRow& b) { return add_rows(a, negate_row(b)); }

const AffineRow& entry(const AffineExpr& e, int i) {
  return e.rows.size() == 1 ? e.rows[0] : e.rows[static_cast<std::size_t>(i)];
}

AffineExpr broadcast(const AffineExpr& e, Shape shape) {
  if (e.shape == shape) return e;
  AffineExpr out{shape, std::vector<AffineRow>(static_cast<std::size_t>(shape.size()), e.rows[0])};
  return out;
}

std::vector<AffineRow> aux_rows(int first, int count) {
  std::vector<AffineRow> rows;
  rows.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) rows.push_back(column_row(first + i));
  return rows;
}

// 1 + t, 2 x_1, ..., 2 x_k, 1 - t  lies in the SOC  <=>  sum x_i^2 <= t.
ConeConstraint square_cone(const AffineRow& t, std::span<const AffineRow> xs) {
  ConeConstraint cc{ConeKind::SecondOrder, {}};
  cc.rows.push_back(add_rows(constant_row(1.0), t));
  for (const AffineRow& x : xs) cc.rows.push_back(scale_row(ParamValue(2.0), x));
  cc.rows.push_back(sub_rows(constant_row(1.0), t));
  return cc;
}

}  // namespace

GraphImpl graph_implementation(AtomKind kind, std::span<const AffineExpr> args,
                               Shape result_shape, int first_aux_column) {
  const AtomMeta& meta = atom_meta(kind);
  if (meta.curvature == CurvatureClass::Affine) {
    throw Error(ErrorCode::ContractViolation,
                std::string(meta.name) + " is affine and has no graph implementation");
  }
  GraphImpl g;
  const int n = result_shape.size();
  const AffineExpr& x = args[0];
  const int arg_size = static_cast<int>(x.rows.size());
  auto nonneg = [&](std::vector<AffineRow> rows) {
    g.constraints.push_back(ConeConstraint{ConeKind::Nonneg, std::move(rows)});
  };

  switch (kind) {
    case AtomKind::Abs: {
      g.aux_columns = n;
      auto t = aux_rows(first_aux_column, n);
      std::vector<AffineRow> rows;
      for (int i = 0; i < n; ++i) rows.push_back(sub_rows(t[i], x.rows[i]));
      for (int i = 0; i < n; ++i) rows.push_back(add_rows(t[i], x.rows[i]));
      nonneg(std::move(rows));
      g.substitute = AffineExpr{result_shape, std::move(t)};
      break;
    }
    case AtomKind::Square: {
      g.aux_columns = n;
      auto t = aux_rows(first_aux_column, n);
      for (int i = 0; i < n; ++i) {
        g.constraints.push_back(square_cone(t[i], std::span<const AffineRow>(&x.rows[i], 1)));
      }
      g.substitute = AffineExpr{result_shape, std::move(t)};
      break;
    }
    case AtomKind::SumSquares: {
      g.aux_columns = 1;
      AffineRow t = column_row(first_aux_column);
      g.constraints.push_back(square_cone(t, x.rows));
      g.substitute = AffineExpr{result_shape, {t}};
      break;
    }
    case AtomKind::Norm1: {
      g.aux_columns = arg_size;
      auto u = aux_rows(first_aux_column, arg_size);
      std::vector<AffineRow> rows;
      for (int i = 0; i < arg_size; ++i) rows.push_back(sub_rows(u[i], x.rows[i]));
      for (int i = 0; i < arg_size; ++i) rows.push_back(add_rows(u[i], x.rows[i]));
      nonneg(std::move(rows));
      AffineRow total;
      for (int i = 0; i < arg_size; ++i) total = add_rows(total, u[i]);
      g.substitute = AffineExpr{result_shape, {total}};
      break;
    }
    case AtomKind::Norm2: {
      g.aux_columns = 1;
      AffineRow t = column_row(first_aux_column);
      ConeConstraint cc{ConeKind::SecondOrder, {t}};
      for (const AffineRow& xi : x.rows) cc.rows.push_back(xi);
      g.constraints.push_back(std::move(cc));
      g.substitute = AffineExpr{result_shape, {t}};
      break;
    }
    case AtomKind::NormInf: {
      g.aux_columns = 1;
      AffineRow t = column_row(first_aux_column);
      std::vector<AffineRow> rows;
      for (int i = 0; i < arg_size; ++i) rows.push_back(sub_rows(t, x.rows[i]));
      for (int i = 0; i < arg_size; ++i) rows.push_back(add_rows(t, x.rows[i]));
      nonneg(std::move(rows));
      g.substitute = AffineExpr{result_shape, {t}};
      break;
    }
    case AtomKind::Pos: {
      g.aux_columns = n;
      auto t = aux_rows(first_aux_column, n);
      std::vector<AffineRow> rows;
      for (int i = 0; i < n; ++i) rows.push_back(sub_rows(t[i], x.rows[i]));
      for (int i = 0; i < n; ++i) rows.push_back(t[i]);
      nonneg(std::move(rows));
      g.substitute = AffineExpr{result_shape, std::move(t)};
      break;
    }
    case AtomKind::Maximum:
    case AtomKind::Minimum: {
      const bool is_max = kind == AtomKind::Maximum;
      g.aux_columns = n;
      auto t = aux_rows(first_aux_column, n);
      std::vector<AffineRow> rows;
      for (const AffineExpr& a : args) {
        for (int i = 0; i < n; ++i) {
          rows.push_back(is_max ? sub_rows(t[i], entry(a, i)) : sub_rows(entry(a, i), t[i]));
        }
      }
      nonneg(std::move(rows));
      g.substitute = AffineExpr{result_shape, std::move(t)};
      break;
    }
    default:
      throw Error(ErrorCode::ContractViolation, "no graph implementation for this atom");
  }
  return g;
}

// ---------------------------------------------------------------------------
// Canonicalization

NotDcpError::NotDcpError(DcpVerdict verdict)
    : Error(ErrorCode::NotDcp,
            "problem is not DCP" +
                (verdict.offense ? ": " + describe(*verdict.offense) : std::string())),
      verdict_(std::move(verdict)) {}

namespace {

class Lowering {
 public:
  Lowering(int first_aux_column, std::map<std::int64_t, ColumnRange> var_index,
           std::map<std::int64_t, int> param_slots)
      : next_col_(first_aux_column),
        var_index_(std::move(var_index)),
        param_slots_(std::move(param_slots)) {}

  AffineExpr lower(const Expr& e) {
    const Shape shape = e.shape();
    switch (e.kind()) {
      case NodeKind::Variable: {
        const ColumnRange& r = var_index_.at(e.id());
        return AffineExpr{shape, aux_rows(r.offset, r.size)};
      }
      case NodeKind::Parameter: {
        const int slot = param_slots_.at(e.id());
        AffineExpr out{shape, {}};
        for (int i = 0; i < shape.size(); ++i) {
          out.rows.push_back(constant_row(ParamValue::parameter(slot + i)));
        }
        return out;
      }
      case NodeKind::Constant: return constant_expr(e.value());
      case NodeKind::Atom: break;
    }
    const auto& args = e.args();
    switch (e.atom()) {
      case AtomKind::Add: {
        AffineExpr out = broadcast(lower(args[0]), shape);
        for (std::size_t k = 1; k < args.size(); ++k) {
          AffineExpr term = broadcast(lower(args[k]), shape);
          for (std::size_t i = 0; i < out.rows.size(); ++i) {
            out.rows[i] = add_rows(out.rows[i], term.rows[i]);
          }
        }
        return out;
      }
      case AtomKind::Negate: {
        AffineExpr out = lower(args[0]);
        for (AffineRow& r : out.rows) r = negate_row(r);
        return out;
      }
      case AtomKind::Scale: return lower_scale(lower(args[0]), lower(args[1]), shape);
      case AtomKind::Sum: {
        AffineExpr in = lower(args[0]);
        AffineRow total;
        for (const AffineRow& r : in.rows) total = add_rows(total, r);
        return AffineExpr{shape, {total}};
      }
      case AtomKind::Index: {
        AffineExpr in = lower(args[0]);
        return AffineExpr{shape, {in.rows[static_cast<std::size_t>(e.index())]}};
      }
      default: break;
    }
    if (e.is_variable_free()) {
      if (!e.is_parameter_free()) {
        throw Error(ErrorCode::NonAffineParameter,
                    "parameters may only enter affinely: " + to_string(e));
      }
      return constant_expr(evaluate(e, {}, {}));
    }
    std::vector<AffineExpr> lowered;
    lowered.reserve(args.size());
    for (const Expr& a : args) lowered.push_back(lower(a));
    GraphImpl g = graph_implementation(e.atom(), lowered, shape, next_col_);
    next_col_ += g.aux_columns;
    for (ConeConstraint& cc : g.constraints) emit(std::move(cc));
    return std::move(g.substitute);
  }

  void emit(ConeConstraint cc) {
    switch (cc.kind) {
      case ConeKind::Zero:
        for (AffineRow& r : cc.rows) zero_.push_back(std::move(r));
        break;
      case ConeKind::Nonneg:
        for (AffineRow& r : cc.rows) nonneg_.push_back(std::move(r));
        break;
      case ConeKind::SecondOrder: soc_.push_back(std::move(cc.rows)); break;
    }
  }

  int num_columns() const { return next_col_; }
  std::vector<AffineRow>& zero_rows() { return zero_; }
  std::vector<AffineRow>& nonneg_rows() { return nonneg_; }
  std::vector<std::vector<AffineRow>>& soc_blocks() { return soc_; }

 private:
  static AffineExpr constant_expr(const Eigen::MatrixXd& m) {
    AffineExpr out{Shape(static_cast<int>(m.rows()), static_cast<int>(m.cols())), {}};
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) out.rows.push_back(constant_row(m(i, j)));
    }
    return out;
  }

  static AffineExpr lower_scale(const AffineExpr& f, const AffineExpr& x, Shape shape) {
    AffineExpr out{shape, {}};
    if (f.shape.is_scalar()) {
      for (const AffineRow& r : x.rows) out.rows.push_back(scale_row(f.rows[0].offset, r));
      return out;
    }
    if (x.shape.is_scalar()) {
      for (const AffineRow& fr : f.rows) out.rows.push_back(scale_row(fr.offset, x.rows[0]));
      return out;
    }
    const int fr = f.shape.rows();
    const int inner = f.shape.cols();
    const int xr = x.shape.rows();
    out.rows.resize(static_cast<std::size_t>(shape.size()));
    for (int j = 0; j < shape.cols(); ++j) {
      for (int i = 0; i < fr; ++i) {
        AffineRow acc;
        for (int l = 0; l < inner; ++l) {
          const ParamValue& fil = f.rows[static_cast<std::size_t>(l * fr + i)].offset;
          if (fil.is_zero()) continue;
          acc = add_rows(acc, scale_row(fil, x.rows[static_cast<std::size_t>(j * xr + l)]));
        }
        out.rows[static_cast<std::size_t>(j * fr + i)] = std::move(acc);
      }
    }
    return out;
  }

  int next_col_;
  std::map<std::int64_t, ColumnRange> var_index_;
  std::map<std::int64_t, int> param_slots_;
  std::vector<AffineRow> zero_;
  std::vector<AffineRow> nonneg_;
  std::vector<std::vector<AffineRow>> soc_;
};

}  // namespace

std::size_t CanonTemplate::num_parameter_entries() const {
  std::size_t n = offset_.is_constant() ? 0 : 1;
  for (const auto& [col, v] : c_) n += v.is_constant() ? 0 : 1;
  for (const Entry& e : a_) n += e.value.is_constant() ? 0 : 1;
  for (const ParamValue& v : b_) n += v.is_constant() ? 0 : 1;
  return n;
}

std::shared_ptr<const CanonTemplate> canonicalize(const Problem& problem) {
  DcpVerdict verdict = is_dcp(problem, true);
  if (!verdict.compliant) throw NotDcpError(std::move(verdict));

  auto tmpl = std::make_shared<CanonTemplate>();
  tmpl->verdict_ = std::move(verdict);
  tmpl->sense_ = problem.sense();
  tmpl->objective_ = problem.objective();

  const std::vector<Expr> roots = problem.roots();
  tmpl->variables_ = collect_variables(roots);
  int col = 0;
  for (const Expr& v : tmpl->variables_) {
    tmpl->var_index_[v.id()] = ColumnRange{col, v.size()};
    col += v.size();
  }
  std::map<std::int64_t, int> slots;
  int slot = 0;
  for (const Expr& p : collect_parameters(roots)) {
    tmpl->parameters_.push_back(ParamSlot{p, slot, p.size()});
    slots[p.id()] = slot;
    slot += p.size();
  }

  Lowering low(col, tmpl->var_index_, std::move(slots));
  AffineRow objective = low.lower(problem.objective()).rows[0];
  if (problem.sense() == Sense::Maximize) objective = negate_row(objective);
  for (const auto& [c, v] : objective.coeffs) tmpl->c_.emplace_back(c, v);
  tmpl->offset_ = objective.offset;

  // Constraint g(x) = rhs - lhs goes to {0} (equality) or the nonnegative cone.
  struct Pending {
    ConeKind cone;
    int first;
    int count;
  };
  std::vector<Pending> pending;
  for (const Constraint& con : problem.constraints()) {
    AffineExpr lhs = low.lower(con.lhs);
    AffineExpr rhs = low.lower(con.rhs);
    const Shape shapes[] = {lhs.shape, rhs.shape};
    const Shape shape = broadcast_shapes(shapes);
    lhs = broadcast(lhs, shape);
    rhs = broadcast(rhs, shape);
    auto& segment = con.relation == Relation::Eq ? low.zero_rows() : low.nonneg_rows();
    const int first = static_cast<int>(segment.size());
    for (int i = 0; i < shape.size(); ++i) {
      segment.push_back(sub_rows(rhs.rows[static_cast<std::size_t>(i)],
                                 lhs.rows[static_cast<std::size_t>(i)]));
    }
    pending.push_back(
        Pending{con.relation == Relation::Eq ? ConeKind::Zero : ConeKind::Nonneg, first,
                shape.size()});
  }

  const int num_zero = static_cast<int>(low.zero_rows().size());
  for (const Pending& p : pending) {
    tmpl->constraint_rows_.push_back(
        ConstraintRows{p.cone, p.cone == ConeKind::Zero ? p.first : num_zero + p.first, p.count});
  }

  // Ax + s = b with s = g(x) = coeffs . x + offset  =>  A = -coeffs, b = offset.
  int row = 0;
  auto append = [&](const AffineRow& g) {
    for (const auto& [c, v] : g.coeffs) tmpl->a_.push_back(CanonTemplate::Entry{row, c, -v});
    tmpl->b_.push_back(g.offset);
    ++row;
  };
  for (const AffineRow& g : low.zero_rows()) append(g);
  for (const AffineRow& g : low.nonneg_rows()) append(g);
  for (const auto& block : low.soc_blocks()) {
    for (const AffineRow& g : block) append(g);
    tmpl->cones_.soc.push_back(static_cast<int>(block.size()));
  }
  tmpl->cones_.zero = num_zero;
  tmpl->cones_.nonneg = static_cast<int>(low.nonneg_rows().size());
  tmpl->num_vars_ = low.num_columns();
  return tmpl;
}

ConeProgram CanonTemplate::stuff(const ParamBinding& binding) const {
  std::vector<double> slots;
  for (const ParamSlot& p : parameters_) {
    const Eigen::VectorXd& v = bound_value(p.param, binding);
    slots.insert(slots.end(), v.data(), v.data() + v.size());
  }
  ConeProgram prog;
  prog.c = Eigen::VectorXd::Zero(num_vars_);
  for (const auto& [col, v] : c_) prog.c[col] = v.eval(slots);
  prog.offset = offset_.eval(slots);
  prog.a.reserve(a_.size());
  for (const Entry& e : a_) prog.a.push_back(Triplet{e.row, e.col, e.value.eval(slots)});
  prog.b.resize(static_cast<Eigen::Index>(b_.size()));
  for (std::size_t i = 0; i < b_.size(); ++i) prog.b[static_cast<Eigen::Index>(i)] = b_[i].eval(slots);
  prog.cones = cones_;
  prog.var_index = var_index_;
  stuff_count_.fetch_add(1);
  return prog;
}

ConeProgram canonicalize_frozen(const Problem& problem, const ParamBinding& binding) {
  std::vector<Constraint> constraints;
  for (const Constraint& c : problem.constraints()) {
    constraints.push_back(Constraint{freeze_parameters(c.lhs, binding), c.relation,
                                     freeze_parameters(c.rhs, binding)});
  }
  Problem frozen(problem.sense(), freeze_parameters(problem.objective(), binding),
                 std::move(constraints));
  return canonicalize(frozen)->stuff({});
}

RecoveredSolution recover_solution(const ConeSolution& solution, const CanonTemplate& tmpl,
                                   const ParamBinding& binding) {
  if (solution.status != Status::Optimal && solution.status != Status::MaxItersInaccurate) {
    throw Error(ErrorCode::StatusMismatch,
                std::string("no primal solution to recover, status is ") +
                    to_string(solution.status));
  }
  if (solution.x.size() != tmpl.num_vars() || solution.y.size() != tmpl.num_rows()) {
    throw Error(ErrorCode::DimensionMismatch, "cone solution does not match the template");
  }
  RecoveredSolution out;
  for (const auto& [id, range] : tmpl.var_index()) {
    out.values[id] = solution.x.segment(range.offset, range.size);
  }
  out.objective = evaluate_scalar(tmpl.objective(), out.values, binding);
  for (const ConstraintRows& r : tmpl.constraint_rows()) {
    out.duals.push_back(solution.y.segment(r.first_row, r.num_rows));
  }
  return out;
}

}  // namespace dcpx
