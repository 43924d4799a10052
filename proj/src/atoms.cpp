#include "dcpx/atoms.hpp"

#include <array>

#include "dcpx/error.hpp"

namespace dcpx {

Shape broadcast_shapes(std::span<const Shape> shapes) {
  Shape out = Shape::scalar();
  for (const Shape& s : shapes) {
    if (s.is_scalar()) continue;
    if (out.is_scalar()) {
      out = s;
    } else if (!(out == s)) {
      throw Error(ErrorCode::ShapeMismatch,
                  "incompatible shapes " + to_string(out) + " and " + to_string(s));
    }
  }
  return out;
}

namespace {

Shape shape_broadcast(std::span<const Shape> args, int) { return broadcast_shapes(args); }
Shape shape_same(std::span<const Shape> args, int) { return args[0]; }
Shape shape_scalar(std::span<const Shape>, int) { return Shape::scalar(); }

// args[0] is the constant/parameter factor.
Shape shape_scale(std::span<const Shape> args, int) {
  const Shape& f = args[0];
  const Shape& e = args[1];
  if (f.is_scalar()) return e;
  if (e.is_scalar()) return f;
  if (f.cols() == e.rows()) return Shape(f.rows(), e.cols());
  throw Error(ErrorCode::ShapeMismatch,
              "cannot multiply " + to_string(f) + " by " + to_string(e));
}

Shape shape_index(std::span<const Shape> args, int index) {
  if (!args[0].is_column()) {
    throw Error(ErrorCode::ShapeMismatch, "indexing requires a vector, got " + to_string(args[0]));
  }
  if (index < 0 || index >= args[0].rows()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "index " + std::to_string(index) + " out of range for length " +
                    std::to_string(args[0].rows()));
  }
  return Shape::scalar();
}

Sign sign_fold_add(std::span<const Sign> args) {
  Sign s = args[0];
  for (std::size_t i = 1; i < args.size(); ++i) s = sign_add(s, args[i]);
  return s;
}
Sign sign_fold_max(std::span<const Sign> args) {
  Sign s = args[0];
  for (std::size_t i = 1; i < args.size(); ++i) s = sign_max(s, args[i]);
  return s;
}
Sign sign_fold_min(std::span<const Sign> args) {
  Sign s = args[0];
  for (std::size_t i = 1; i < args.size(); ++i) s = sign_min(s, args[i]);
  return s;
}
Sign sign_negate(std::span<const Sign> args) { return sign_neg(args[0]); }
Sign sign_product(std::span<const Sign> args) { return sign_mul(args[0], args[1]); }
Sign sign_passthrough(std::span<const Sign> args) { return args[0]; }
// Norm-like atoms: zero only when the argument is identically zero.
Sign sign_magnitude(std::span<const Sign> args) {
  return args[0] == Sign::Zero ? Sign::Zero : Sign::Nonneg;
}
Sign sign_pos(std::span<const Sign> args) {
  return is_nonpos(args[0]) ? Sign::Zero : Sign::Nonneg;
}

Monotonicity mono_increasing(int, Sign) { return Monotonicity::Nondecreasing; }
Monotonicity mono_decreasing(int, Sign) { return Monotonicity::Nonincreasing; }
Monotonicity mono_none(int, Sign) { return Monotonicity::Nonmonotonic; }
// |x|, x^2 and norms grow with the magnitude of their argument.
Monotonicity mono_magnitude(int, Sign s) {
  if (is_nonneg(s)) return Monotonicity::Nondecreasing;
  if (is_nonpos(s)) return Monotonicity::Nonincreasing;
  return Monotonicity::Nonmonotonic;
}

constexpr int kVariadic = -1;

constexpr std::array<AtomMeta, 14> kAtoms = {{
    {AtomKind::Add, "add", 2, kVariadic, CurvatureClass::Affine, shape_broadcast, sign_fold_add,
     mono_increasing},
    {AtomKind::Negate, "negate", 1, 1, CurvatureClass::Affine, shape_same, sign_negate,
     mono_decreasing},
    {AtomKind::Scale, "scale", 2, 2, CurvatureClass::Affine, shape_scale, sign_product, mono_none},
    {AtomKind::Sum, "sum", 1, 1, CurvatureClass::Affine, shape_scalar, sign_passthrough,
     mono_increasing},
    {AtomKind::Index, "index", 1, 1, CurvatureClass::Affine, shape_index, sign_passthrough,
     mono_increasing},
    {AtomKind::Abs, "abs", 1, 1, CurvatureClass::Convex, shape_same, sign_magnitude,
     mono_magnitude},
    {AtomKind::Square, "square", 1, 1, CurvatureClass::Convex, shape_same, sign_magnitude,
     mono_magnitude},
    {AtomKind::SumSquares, "sum_squares", 1, 1, CurvatureClass::Convex, shape_scalar,
     sign_magnitude, mono_magnitude},
    {AtomKind::Norm1, "norm1", 1, 1, CurvatureClass::Convex, shape_scalar, sign_magnitude,
     mono_magnitude},
    {AtomKind::Norm2, "norm2", 1, 1, CurvatureClass::Convex, shape_scalar, sign_magnitude,
     mono_magnitude},
    {AtomKind::NormInf, "norm_inf", 1, 1, CurvatureClass::Convex, shape_scalar, sign_magnitude,
     mono_magnitude},
    {AtomKind::Pos, "pos", 1, 1, CurvatureClass::Convex, shape_same, sign_pos, mono_increasing},
    {AtomKind::Maximum, "maximum", 2, kVariadic, CurvatureClass::Convex, shape_broadcast,
     sign_fold_max, mono_increasing},
    {AtomKind::Minimum, "minimum", 2, kVariadic, CurvatureClass::Concave, shape_broadcast,
     sign_fold_min, mono_increasing},
}};

constexpr bool table_is_indexed_by_kind() {
  for (std::size_t i = 0; i < kAtoms.size(); ++i) {
    if (static_cast<std::size_t>(kAtoms[i].kind) != i) return false;
  }
  return true;
}
static_assert(table_is_indexed_by_kind());

}  // namespace

const AtomMeta& atom_meta(AtomKind kind) { return kAtoms[static_cast<std::size_t>(kind)]; }

std::span<const AtomMeta> all_atoms() { return kAtoms; }

std::optional<AtomKind> atom_from_name(std::string_view name) {
  for (const AtomMeta& m : kAtoms) {
    if (m.name == name) return m.kind;
  }
  return std::nullopt;
}

std::string_view atom_name(AtomKind kind) { return atom_meta(kind).name; }

}  // namespace dcpx
