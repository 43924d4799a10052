#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcpx/binding.hpp"
#include "dcpx/problem.hpp"
#include "dcpx/solver.hpp"

namespace dcpx {

struct Solution {
  Status status = Status::Optimal;
  // +inf / -inf for infeasible / unbounded minimizations (signs flip for
  // maximizations); NaN for failed sweep points.
  double value = 0.0;
  VarValues primal;
  std::vector<Eigen::VectorXd> duals;
  int iterations = 0;
  Residuals residuals;
  // Set only when status is Failed.
  std::string error;

  // Value of a variable leaf; throws MissingBinding when the solve did not
  // produce values (infeasible, unbounded or failed).
  const Eigen::VectorXd& value_of(const Expr& variable) const;
};

// is_dcp -> cached template -> stuff -> solve_cone -> recover.
// Throws NotDcpError, MissingBinding, SignViolation.
Solution solve(const Problem& problem, const ParamBinding& binding = {},
               const SolverSettings& settings = {});

struct SweepSpec {
  Expr parameter;
  std::vector<double> values;
  int workers = 1;
};

// One solution per value, in input order. Points that throw are recorded with
// status Failed and do not stop the sweep. `base` supplies the other
// parameters.
std::vector<Solution> sweep(const Problem& problem, const SweepSpec& spec,
                            const ParamBinding& base = {},
                            const SolverSettings& settings = {});

// n points from 10^lo to 10^hi inclusive.
std::vector<double> logspace(double lo, double hi, int n);

}  // namespace dcpx
