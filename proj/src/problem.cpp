#include "dcpx/problem.hpp"

#include <atomic>
#include <mutex>

#include "dcpx/atoms.hpp"
#include "dcpx/canon.hpp"
#include "dcpx/error.hpp"

namespace dcpx {

Constraint make_constraint(Expr lhs, Relation relation, Expr rhs) {
  if (!lhs.valid() || !rhs.valid()) {
    throw Error(ErrorCode::ContractViolation, "constraint side is an empty expression");
  }
  const Shape shapes[] = {lhs.shape(), rhs.shape()};
  broadcast_shapes(shapes);
  return Constraint{std::move(lhs), relation, std::move(rhs)};
}

Constraint make_ge_constraint(Expr lhs, Expr rhs) {
  return make_constraint(std::move(rhs), Relation::Leq, std::move(lhs));
}

Constraint operator==(const Expr& lhs, const Expr& rhs) {
  return make_constraint(lhs, Relation::Eq, rhs);
}
Constraint operator<=(const Expr& lhs, const Expr& rhs) {
  return make_constraint(lhs, Relation::Leq, rhs);
}
Constraint operator>=(const Expr& lhs, const Expr& rhs) { return make_ge_constraint(lhs, rhs); }
Constraint operator==(const Expr& lhs, double rhs) { return lhs == make_constant(rhs); }
Constraint operator<=(const Expr& lhs, double rhs) { return lhs <= make_constant(rhs); }
Constraint operator>=(const Expr& lhs, double rhs) { return lhs >= make_constant(rhs); }
Constraint operator<=(double lhs, const Expr& rhs) { return make_constant(lhs) <= rhs; }
Constraint operator>=(double lhs, const Expr& rhs) { return make_constant(lhs) >= rhs; }

const char* to_string(Relation relation) { return relation == Relation::Eq ? "==" : "<="; }
const char* to_string(Sense sense) { return sense == Sense::Minimize ? "minimize" : "maximize"; }

struct Problem::Cache {
  std::mutex mutex;
  std::shared_ptr<const CanonTemplate> tmpl;
  std::atomic<std::size_t> canonicalizations{0};
};

Problem::Problem(Sense sense, Expr objective, std::vector<Constraint> constraints)
    : sense_(sense),
      objective_(std::move(objective)),
      constraints_(std::move(constraints)),
      cache_(std::make_shared<Cache>()) {
  if (!objective_.valid()) {
    throw Error(ErrorCode::ContractViolation, "problem objective is an empty expression");
  }
  if (!objective_.shape().is_scalar()) {
    throw Error(ErrorCode::ShapeMismatch,
                "objective must be scalar, got " + to_string(objective_.shape()));
  }
  for (const Constraint& c : constraints_) {
    const Shape shapes[] = {c.lhs.shape(), c.rhs.shape()};
    broadcast_shapes(shapes);
  }
}

std::vector<Expr> Problem::roots() const {
  std::vector<Expr> out{objective_};
  for (const Constraint& c : constraints_) {
    out.push_back(c.lhs);
    out.push_back(c.rhs);
  }
  return out;
}

std::shared_ptr<const CanonTemplate> Problem::canon_template() const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  if (!cache_->tmpl) {
    cache_->tmpl = canonicalize(*this);
    cache_->canonicalizations.fetch_add(1);
  }
  return cache_->tmpl;
}

std::size_t Problem::canonicalization_count() const { return cache_->canonicalizations.load(); }

Problem minimize(Expr objective, std::vector<Constraint> constraints) {
  return Problem(Sense::Minimize, std::move(objective), std::move(constraints));
}

Problem maximize(Expr objective, std::vector<Constraint> constraints) {
  return Problem(Sense::Maximize, std::move(objective), std::move(constraints));
}

Problem add_problems(const Problem& p, const Problem& q) {
  if (p.sense() != q.sense()) {
    throw Error(ErrorCode::MixedSense, std::string("cannot add a ") + to_string(p.sense()) +
                                           " problem to a " + to_string(q.sense()) + " problem");
  }
  std::vector<Constraint> constraints = p.constraints();
  constraints.insert(constraints.end(), q.constraints().begin(), q.constraints().end());
  return Problem(p.sense(), p.objective() + q.objective(), std::move(constraints));
}

Problem operator+(const Problem& p, const Problem& q) { return add_problems(p, q); }

Problem sum_problems(const std::vector<Problem>& problems) {
  if (problems.empty()) throw Error(ErrorCode::ArityError, "sum_problems needs at least one problem");
  Problem total = problems.front();
  for (std::size_t i = 1; i < problems.size(); ++i) total = add_problems(total, problems[i]);
  return total;
}

}  // namespace dcpx
