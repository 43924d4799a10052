#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dcpx/expr.hpp"
#include "dcpx/lattice.hpp"
#include "dcpx/problem.hpp"

namespace dcpx {

// Bottom-up sign and curvature analysis with a per-instance memo. One
// analyzer per thread; the free functions below create a fresh one per call.
//
// With `use_signs` off, argument signs are not consulted when looking up
// monotonicity (standard DCP). Known signs of constant and parameter leaves
// still decide the direction of a `Scale`.
class DcpAnalyzer {
 public:
  explicit DcpAnalyzer(bool use_signs = true) : use_signs_(use_signs) {}

  Sign sign(const Expr& expr);
  Curvature curvature(const Expr& expr);
  bool use_signs() const { return use_signs_; }

 private:
  bool use_signs_;
  std::unordered_map<const detail::Node*, Sign> signs_;
  std::unordered_map<const detail::Node*, Curvature> curvatures_;
};

Sign sign(const Expr& expr);
Curvature curvature(const Expr& expr, bool use_signs = true);

// Per-atom table lookup. Throws IndexOutOfRange for an index past the atom's
// arity. Scale reports Nonmonotonic here: its direction comes from the
// factor's sign, which the curvature rule reads directly.
Monotonicity monotonicity(AtomKind kind, int arg_index, Sign arg_sign);

enum class ProblemPart { Objective, ConstraintLhs, ConstraintRhs };

struct DcpOffense {
  ProblemPart part = ProblemPart::Objective;
  std::size_t constraint_index = 0;
  // Child indices from the root of `part` down to the offending node.
  std::vector<int> path;
  Expr node;
  Curvature curvature = Curvature::Unknown;
  std::string reason;
};

struct DcpVerdict {
  bool compliant = true;
  Curvature objective = Curvature::Constant;
  std::vector<std::pair<Curvature, Curvature>> constraints;
  std::optional<DcpOffense> offense;
};

DcpVerdict is_dcp(const Problem& problem, bool use_signs = true);

// One-line rendering of an offense location, e.g. "constraint 0 lhs / arg 1".
std::string describe(const DcpOffense& offense);

}  // namespace dcpx
