#pragma once

#include <Eigen/Dense>

#include "dcpx/cone_program.hpp"

namespace dcpx {

struct SolverSettings {
  double eps_primal = 1e-6;
  double eps_dual = 1e-6;
  double eps_gap = 1e-6;
  int max_iters = 100000;
  // Over-relaxation, 0 < alpha < 2.
  double alpha = 1.5;
  // Penalty on the slack block; zero-cone rows use 1e3 * rho.
  double rho = 1.0;
  // Proximal weight on x, keeps the linear system definite when A is
  // rank deficient.
  double sigma = 1e-6;
  // Normalized residual at or below which an iterate difference is accepted
  // as an infeasibility / unboundedness certificate.
  double eps_certificate = 1e-7;

  // Throws InvalidSettings.
  void validate() const;
};

enum class Status { Optimal, Infeasible, Unbounded, MaxItersInaccurate, Failed };

const char* to_string(Status status);

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

struct ConeSolution {
  Status status = Status::Optimal;
  Eigen::VectorXd x;
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  int iterations = 0;
  Residuals residuals;
  // Infeasible: y with A'y = 0, b'y < 0. Unbounded: x with Ax in -K, c'x < 0.
  Eigen::VectorXd certificate;

  double objective(const ConeProgram& prog) const { return prog.c.dot(x); }
};

// Euclidean projection onto K (or onto its dual cone when `dual` is set; only
// the zero segment differs, since its dual is the whole space).
Eigen::VectorXd project_cone(const Eigen::VectorXd& point, const ConeSpec& cones,
                             bool dual = false);

// Normalized residuals
//   primal = |Ax + s - b| / (1 + |b|)
//   dual   = |A'y + c| / (1 + |c|)
//   gap    = |c'x + b'y| / (1 + |c'x| + |b'y|)
Residuals residuals(const ConeProgram& prog, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& s, const Eigen::VectorXd& y);

// ADMM on the splitting {Ax + s = b} x {s in K}. The linear system is
// factored once per call.
ConeSolution solve_cone(const ConeProgram& prog, const SolverSettings& settings = {});

}  // namespace dcpx
