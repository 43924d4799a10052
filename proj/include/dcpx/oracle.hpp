#pragma once

#include "dcpx/cone_program.hpp"
#include "dcpx/solver.hpp"

namespace dcpx {

// Largest num_vars + num_rows accepted by oracle_solve.
inline constexpr int kOracleDimensionCap = 50;

// Dense reference solver for small programs, independent of solve_cone.
// Programs without second-order cones are solved by enumerating vertices
// (active sets); programs with SOCs by a log-barrier interior-point method.
// Accurate to about 1e-5 on well-posed instances. Throws DimensionCapExceeded.
ConeSolution oracle_solve(const ConeProgram& prog);

}  // namespace dcpx
