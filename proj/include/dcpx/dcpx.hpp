#pragma once

#include "dcpx/atoms.hpp"
#include "dcpx/binding.hpp"
#include "dcpx/canon.hpp"
#include "dcpx/cone_program.hpp"
#include "dcpx/dcp.hpp"
#include "dcpx/error.hpp"
#include "dcpx/expr.hpp"
#include "dcpx/lattice.hpp"
#include "dcpx/oracle.hpp"
#include "dcpx/problem.hpp"
#include "dcpx/shape.hpp"
#include "dcpx/solve.hpp"
#include "dcpx/solver.hpp"
#include "dcpx/syntax.hpp"
