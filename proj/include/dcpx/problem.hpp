#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "dcpx/expr.hpp"

namespace dcpx {

class CanonTemplate;

enum class Sense { Minimize, Maximize };

// `>=` never survives construction: it is stored as `<=` with the sides
// swapped.
enum class Relation { Eq, Leq };

struct Constraint {
  Expr lhs;
  Relation relation = Relation::Eq;
  Expr rhs;
};

// Sides must have equal shapes, or one side must be a scalar that broadcasts.
Constraint make_constraint(Expr lhs, Relation relation, Expr rhs);
Constraint make_ge_constraint(Expr lhs, Expr rhs);

Constraint operator==(const Expr& lhs, const Expr& rhs);
Constraint operator<=(const Expr& lhs, const Expr& rhs);
Constraint operator>=(const Expr& lhs, const Expr& rhs);
Constraint operator==(const Expr& lhs, double rhs);
Constraint operator<=(const Expr& lhs, double rhs);
Constraint operator>=(const Expr& lhs, double rhs);
Constraint operator<=(double lhs, const Expr& rhs);
Constraint operator>=(double lhs, const Expr& rhs);

const char* to_string(Relation relation);
const char* to_string(Sense sense);

// Immutable problem. Copies share the canonicalization cache, which is filled
// on first use and never invalidated (nothing in a problem can change).
class Problem {
 public:
  Problem(Sense sense, Expr objective, std::vector<Constraint> constraints = {});

  Sense sense() const { return sense_; }
  const Expr& objective() const { return objective_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  // Every expression root: objective first, then lhs/rhs of each constraint.
  std::vector<Expr> roots() const;

  // Canonicalizes on the first call (throws NotDcp for non-compliant
  // problems) and returns the shared template afterwards. Thread-safe.
  std::shared_ptr<const CanonTemplate> canon_template() const;

  // Number of full canonicalizations this problem (and its copies) performed.
  std::size_t canonicalization_count() const;

 private:
  struct Cache;

  Sense sense_;
  Expr objective_;
  std::vector<Constraint> constraints_;
  std::shared_ptr<Cache> cache_;
};

Problem minimize(Expr objective, std::vector<Constraint> constraints = {});
Problem maximize(Expr objective, std::vector<Constraint> constraints = {});

// Objectives are added and constraint lists concatenated (p's first). Both
// problems must have the same sense; MixedSense otherwise.
Problem add_problems(const Problem& p, const Problem& q);
Problem operator+(const Problem& p, const Problem& q);

// Sum of a non-empty list of problems, folded left to right.
Problem sum_problems(const std::vector<Problem>& problems);

}  // namespace dcpx
