#include "dcpx/dcp.hpp"

#include "dcpx/atoms.hpp"
#include "dcpx/error.hpp"

namespace dcpx {

Sign DcpAnalyzer::sign(const Expr& expr) {
  auto it = signs_.find(expr.get());
  if (it != signs_.end()) return it->second;
  Sign s = Sign::Unknown;
  switch (expr.kind()) {
    case NodeKind::Variable: s = Sign::Unknown; break;
    case NodeKind::Parameter:
    case NodeKind::Constant: s = expr.declared_sign(); break;
    case NodeKind::Atom: {
      std::vector<Sign> args;
      args.reserve(expr.args().size());
      for (const Expr& a : expr.args()) args.push_back(sign(a));
      s = atom_meta(expr.atom()).sign_rule(args);
      break;
    }
  }
  signs_.emplace(expr.get(), s);
  return s;
}

namespace {

// Whether argument `i` of a convex (or, with `concave` set, concave) atom
// composes correctly.
bool composes(Monotonicity mono, Curvature arg, bool concave) {
  if (is_affine(arg)) return true;
  bool up = concave ? is_concave(arg) : is_convex(arg);
  bool down = concave ? is_convex(arg) : is_concave(arg);
  return (mono == Monotonicity::Nondecreasing && up) ||
         (mono == Monotonicity::Nonincreasing && down);
}

}  // namespace

Curvature DcpAnalyzer::curvature(const Expr& expr) {
  auto it = curvatures_.find(expr.get());
  if (it != curvatures_.end()) return it->second;
  Curvature c = Curvature::Unknown;
  switch (expr.kind()) {
    case NodeKind::Variable: c = Curvature::Affine; break;
    case NodeKind::Parameter:
    case NodeKind::Constant: c = Curvature::Constant; break;
    case NodeKind::Atom: {
      const auto& args = expr.args();
      std::vector<Curvature> cs;
      cs.reserve(args.size());
      bool all_constant = true;
      for (const Expr& a : args) {
        cs.push_back(curvature(a));
        all_constant = all_constant && cs.back() == Curvature::Constant;
      }
      const AtomMeta& meta = atom_meta(expr.atom());
      if (all_constant) {
        c = Curvature::Constant;
      } else if (meta.curvature == CurvatureClass::Affine) {
        switch (expr.atom()) {
          case AtomKind::Negate: c = curvature_neg(cs[0]); break;
          case AtomKind::Scale: {
            if (is_affine(cs[1])) {
              c = cs[1];
              break;
            }
            switch (sign(args[0])) {
              case Sign::Zero: c = Curvature::Constant; break;
              case Sign::Nonneg: c = cs[1]; break;
              case Sign::Nonpos: c = curvature_neg(cs[1]); break;
              case Sign::Unknown: c = Curvature::Unknown; break;
            }
            break;
          }
          default: {
            c = cs[0];
            for (std::size_t i = 1; i < cs.size(); ++i) c = curvature_add(c, cs[i]);
          }
        }
      } else {
        const bool concave = meta.curvature == CurvatureClass::Concave;
        bool ok = true;
        for (std::size_t i = 0; i < args.size() && ok; ++i) {
          if (is_affine(cs[i])) continue;
          Sign s = use_signs_ ? sign(args[i]) : Sign::Unknown;
          ok = composes(meta.monotonicity(static_cast<int>(i), s), cs[i], concave);
        }
        c = ok ? (concave ? Curvature::Concave : Curvature::Convex) : Curvature::Unknown;
      }
      break;
    }
  }
  curvatures_.emplace(expr.get(), c);
  return c;
}

Sign sign(const Expr& expr) { return DcpAnalyzer(true).sign(expr); }

Curvature curvature(const Expr& expr, bool use_signs) {
  return DcpAnalyzer(use_signs).curvature(expr);
}

Monotonicity monotonicity(AtomKind kind, int arg_index, Sign arg_sign) {
  const AtomMeta& meta = atom_meta(kind);
  if (arg_index < 0 || (meta.max_arity >= 0 && arg_index >= meta.max_arity)) {
    throw Error(ErrorCode::IndexOutOfRange, "argument index " + std::to_string(arg_index) +
                                                " out of range for " + std::string(meta.name));
  }
  return meta.monotonicity(arg_index, arg_sign);
}

namespace {

struct Deepest {
  int depth = -1;
  std::vector<int> path;
  Expr node;
};

void find_deepest_unknown(DcpAnalyzer& an, const Expr& e, std::vector<int>& path, Deepest& best) {
  if (an.curvature(e) != Curvature::Unknown) return;
  if (static_cast<int>(path.size()) > best.depth) {
    best.depth = static_cast<int>(path.size());
    best.path = path;
    best.node = e;
  }
  if (!e.is_atom()) return;
  for (std::size_t i = 0; i < e.args().size(); ++i) {
    path.push_back(static_cast<int>(i));
    find_deepest_unknown(an, e.args()[i], path, best);
    path.pop_back();
  }
}

std::string composition_reason(DcpAnalyzer& an, const Expr& e) {
  if (!e.is_atom()) return "unknown curvature";
  const auto& args = e.args();
  switch (e.atom()) {
    case AtomKind::Add: return "sum of convex and concave terms";
    case AtomKind::Scale:
      return "product of a factor with unknown sign and a " +
             std::string(to_string(an.curvature(args[1]))) + " expression";
    default: break;
  }
  const AtomMeta& meta = atom_meta(e.atom());
  const bool concave = meta.curvature == CurvatureClass::Concave;
  for (std::size_t i = 0; i < args.size(); ++i) {
    Curvature ci = an.curvature(args[i]);
    Sign si = an.use_signs() ? an.sign(args[i]) : Sign::Unknown;
    Monotonicity m = meta.monotonicity(static_cast<int>(i), si);
    if (!composes(m, ci, concave)) {
      return std::string(meta.name) + " is " + to_string(m) + " in argument " +
             std::to_string(i) + ", which is " + to_string(ci) +
             (an.use_signs() ? " with sign " + std::string(to_string(si)) : std::string());
    }
  }
  return "unknown curvature";
}

DcpOffense locate(DcpAnalyzer& an, const Expr& root, ProblemPart part, std::size_t index,
                  std::string top_reason) {
  DcpOffense off;
  off.part = part;
  off.constraint_index = index;
  Deepest best;
  std::vector<int> path;
  find_deepest_unknown(an, root, path, best);
  if (best.depth >= 0) {
    off.path = best.path;
    off.node = best.node;
    off.reason = composition_reason(an, best.node);
  } else {
    off.node = root;
    off.reason = std::move(top_reason);
  }
  off.curvature = an.curvature(off.node);
  return off;
}

}  // namespace

DcpVerdict is_dcp(const Problem& problem, bool use_signs) {
  DcpAnalyzer an(use_signs);
  DcpVerdict v;
  v.objective = an.curvature(problem.objective());
  const bool minimize = problem.sense() == Sense::Minimize;
  if (!(minimize ? is_convex(v.objective) : is_concave(v.objective))) {
    v.compliant = false;
    v.offense = locate(an, problem.objective(), ProblemPart::Objective, 0,
                       std::string(minimize ? "minimize" : "maximize") + " needs a " +
                           (minimize ? "convex" : "concave") + " objective, got " +
                           to_string(v.objective));
  }
  const auto& cons = problem.constraints();
  for (std::size_t k = 0; k < cons.size(); ++k) {
    Curvature lc = an.curvature(cons[k].lhs);
    Curvature rc = an.curvature(cons[k].rhs);
    v.constraints.emplace_back(lc, rc);
    if (!v.compliant) continue;
    if (cons[k].relation == Relation::Eq) {
      if (!is_affine(lc)) {
        v.compliant = false;
        v.offense = locate(an, cons[k].lhs, ProblemPart::ConstraintLhs, k,
                           std::string("equality sides must be affine, got ") + to_string(lc));
      } else if (!is_affine(rc)) {
        v.compliant = false;
        v.offense = locate(an, cons[k].rhs, ProblemPart::ConstraintRhs, k,
                           std::string("equality sides must be affine, got ") + to_string(rc));
      }
    } else {
      if (!is_convex(lc)) {
        v.compliant = false;
        v.offense = locate(an, cons[k].lhs, ProblemPart::ConstraintLhs, k,
                           std::string("left side of <= must be convex, got ") + to_string(lc));
      } else if (!is_concave(rc)) {
        v.compliant = false;
        v.offense = locate(an, cons[k].rhs, ProblemPart::ConstraintRhs, k,
                           std::string("right side of <= must be concave, got ") + to_string(rc));
      }
    }
  }
  return v;
}

std::string describe(const DcpOffense& offense) {
  std::string s;
  switch (offense.part) {
    case ProblemPart::Objective: s = "objective"; break;
    case ProblemPart::ConstraintLhs:
      s = "constraint " + std::to_string(offense.constraint_index) + " lhs";
      break;
    case ProblemPart::ConstraintRhs:
      s = "constraint " + std::to_string(offense.constraint_index) + " rhs";
      break;
  }
  s += ", path [";
  for (std::size_t i = 0; i < offense.path.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(offense.path[i]);
  }
  s += "]: " + to_string(offense.node) + " (" + offense.reason + ")";
  return s;
}

}  // namespace dcpx
