#include "dcpx/solve.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "dcpx/canon.hpp"
#include "dcpx/error.hpp"

namespace dcpx {

const Eigen::VectorXd& Solution::value_of(const Expr& variable) const {
  auto it = primal.find(variable.id());
  if (!variable.is_variable() || it == primal.end()) {
    throw Error(ErrorCode::MissingBinding,
                "no value for " + to_string(variable) + " (status " + to_string(status) + ")");
  }
  return it->second;
}

Solution solve(const Problem& problem, const ParamBinding& binding,
               const SolverSettings& settings) {
  settings.validate();
  std::shared_ptr<const CanonTemplate> tmpl = problem.canon_template();
  const ConeProgram prog = tmpl->stuff(binding);
  const ConeSolution cs = solve_cone(prog, settings);

  Solution sol;
  sol.status = cs.status;
  sol.iterations = cs.iterations;
  sol.residuals = cs.residuals;
  const bool maximize = problem.sense() == Sense::Maximize;
  const double inf = std::numeric_limits<double>::infinity();
  switch (cs.status) {
    case Status::Optimal:
    case Status::MaxItersInaccurate: {
      RecoveredSolution rec = recover_solution(cs, *tmpl, binding);
      sol.value = rec.objective;
      sol.primal = std::move(rec.values);
      sol.duals = std::move(rec.duals);
      break;
    }
    case Status::Infeasible: sol.value = maximize ? -inf : inf; break;
    case Status::Unbounded: sol.value = maximize ? inf : -inf; break;
    case Status::Failed:
      sol.value = std::numeric_limits<double>::quiet_NaN();
      sol.error = "solver failed";
      break;
  }
  return sol;
}

std::vector<Solution> sweep(const Problem& problem, const SweepSpec& spec,
                            const ParamBinding& base, const SolverSettings& settings) {
  if (!spec.parameter.valid() || !spec.parameter.is_parameter()) {
    throw Error(ErrorCode::ContractViolation, "sweep target is not a parameter");
  }
  if (spec.workers < 1) throw Error(ErrorCode::InvalidSettings, "sweep needs at least one worker");
  settings.validate();
  // Canonicalize once up front so a non-DCP problem fails the whole sweep.
  problem.canon_template();

  std::vector<Solution> out(spec.values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < spec.values.size(); i = next.fetch_add(1)) {
      ParamBinding binding = base;
      Eigen::VectorXd v = Eigen::VectorXd::Constant(spec.parameter.size(), spec.values[i]);
      binding.set(spec.parameter, std::move(v));
      try {
        out[i] = solve(problem, binding, settings);
      } catch (const std::exception& e) {
        Solution failed;
        failed.status = Status::Failed;
        failed.value = std::numeric_limits<double>::quiet_NaN();
        failed.error = e.what();
        out[i] = std::move(failed);
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(spec.workers), std::max<std::size_t>(1, spec.values.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return out;
}

std::vector<double> logspace(double lo, double hi, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidSettings, "logspace needs at least one point");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double e = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    out.push_back(std::pow(10.0, e));
  }
  return out;
}

}  // namespace dcpx
