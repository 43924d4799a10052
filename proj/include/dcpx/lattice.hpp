#pragma once

// Finite lattices used by the convexity analysis.

namespace dcpx {

enum class Sign { Zero, Nonneg, Nonpos, Unknown };

enum class Curvature { Constant, Affine, Convex, Concave, Unknown };

enum class Monotonicity { Nondecreasing, Nonincreasing, Nonmonotonic };

// Zero counts as both nonnegative and nonpositive.
inline bool is_nonneg(Sign s) { return s == Sign::Zero || s == Sign::Nonneg; }
inline bool is_nonpos(Sign s) { return s == Sign::Zero || s == Sign::Nonpos; }

Sign make_sign(bool nonneg, bool nonpos);
Sign sign_of_value(double v);

Sign sign_add(Sign a, Sign b);
Sign sign_mul(Sign a, Sign b);
Sign sign_neg(Sign a);
Sign sign_max(Sign a, Sign b);
Sign sign_min(Sign a, Sign b);

// Least upper bound under CONSTANT <= AFFINE <= {CONVEX, CONCAVE} <= UNKNOWN.
Curvature curvature_add(Curvature a, Curvature b);
Curvature curvature_neg(Curvature c);
// Partial order test: a is at least as strong a verdict as b.
bool curvature_le(Curvature a, Curvature b);

inline bool is_convex(Curvature c) { return curvature_le(c, Curvature::Convex); }
inline bool is_concave(Curvature c) { return curvature_le(c, Curvature::Concave); }
inline bool is_affine(Curvature c) { return curvature_le(c, Curvature::Affine); }

const char* to_string(Sign s);
const char* to_string(Curvature c);
const char* to_string(Monotonicity m);

}  // namespace dcpx
