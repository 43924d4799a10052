#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "dcpx/expr.hpp"
#include "dcpx/lattice.hpp"
#include "dcpx/shape.hpp"

namespace dcpx {

enum class CurvatureClass { Affine, Convex, Concave };

// Static description of one atom kind. The rules are plain functions so the
// table can be constexpr-initialised and shared by every analysis pass.
struct AtomMeta {
  AtomKind kind;
  std::string_view name;
  int min_arity;
  int max_arity;  // -1: variadic
  CurvatureClass curvature;
  // Throws Error(ShapeMismatch) when the argument shapes are not accepted.
  Shape (*shape_rule)(std::span<const Shape> args, int index);
  Sign (*sign_rule)(std::span<const Sign> args);
  Monotonicity (*monotonicity)(int arg_index, Sign arg_sign);
};

const AtomMeta& atom_meta(AtomKind kind);
std::span<const AtomMeta> all_atoms();

// Lookup by the surface name used in problem files (e.g. "norm_inf").
std::optional<AtomKind> atom_from_name(std::string_view name);
std::string_view atom_name(AtomKind kind);

// Shape produced by elementwise broadcasting of scalars against one common
// shape. Throws ShapeMismatch for two different non-scalar shapes.
Shape broadcast_shapes(std::span<const Shape> shapes);

}  // namespace dcpx
