#include "dcpx/lattice.hpp"

namespace dcpx {

Sign make_sign(bool nonneg, bool nonpos) {
  if (nonneg && nonpos) return Sign::Zero;
  if (nonneg) return Sign::Nonneg;
  if (nonpos) return Sign::Nonpos;
  return Sign::Unknown;
}

Sign sign_of_value(double v) { return make_sign(v >= 0.0, v <= 0.0); }

Sign sign_add(Sign a, Sign b) {
  return make_sign(is_nonneg(a) && is_nonneg(b), is_nonpos(a) && is_nonpos(b));
}

Sign sign_mul(Sign a, Sign b) {
  if (a == Sign::Zero || b == Sign::Zero) return Sign::Zero;
  if (a == Sign::Unknown || b == Sign::Unknown) return Sign::Unknown;
  return a == b ? Sign::Nonneg : Sign::Nonpos;
}

Sign sign_neg(Sign a) { return make_sign(is_nonpos(a), is_nonneg(a)); }

Sign sign_max(Sign a, Sign b) {
  return make_sign(is_nonneg(a) || is_nonneg(b), is_nonpos(a) && is_nonpos(b));
}

Sign sign_min(Sign a, Sign b) {
  return make_sign(is_nonneg(a) && is_nonneg(b), is_nonpos(a) || is_nonpos(b));
}

namespace {
int rank(Curvature c) {
  switch (c) {
    case Curvature::Constant: return 0;
    case Curvature::Affine: return 1;
    case Curvature::Convex:
    case Curvature::Concave: return 2;
    case Curvature::Unknown: return 3;
  }
  return 3;
}
}  // namespace

bool curvature_le(Curvature a, Curvature b) {
  if (a == b) return true;
  if (rank(a) == 2 && rank(b) == 2) return false;
  return rank(a) < rank(b);
}

Curvature curvature_add(Curvature a, Curvature b) {
  if (curvature_le(a, b)) return b;
  if (curvature_le(b, a)) return a;
  return Curvature::Unknown;
}

Curvature curvature_neg(Curvature c) {
  if (c == Curvature::Convex) return Curvature::Concave;
  if (c == Curvature::Concave) return Curvature::Convex;
  return c;
}

const char* to_string(Sign s) {
  switch (s) {
    case Sign::Zero: return "zero";
    case Sign::Nonneg: return "nonneg";
    case Sign::Nonpos: return "nonpos";
    case Sign::Unknown: return "unknown";
  }
  return "unknown";
}

const char* to_string(Curvature c) {
  switch (c) {
    case Curvature::Constant: return "constant";
    case Curvature::Affine: return "affine";
    case Curvature::Convex: return "convex";
    case Curvature::Concave: return "concave";
    case Curvature::Unknown: return "unknown";
  }
  return "unknown";
}

const char* to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::Nondecreasing: return "nondecreasing";
    case Monotonicity::Nonincreasing: return "nonincreasing";
    case Monotonicity::Nonmonotonic: return "nonmonotonic";
  }
  return "nonmonotonic";
}

}  // namespace dcpx
