#include "dcpx/solver.hpp"

#include <cmath>

#include "dcpx/error.hpp"

namespace dcpx {

void SolverSettings::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw Error(ErrorCode::InvalidSettings, msg);
  };
  require(eps_primal > 0 && eps_dual > 0 && eps_gap > 0, "tolerances must be positive");
  require(max_iters >= 1, "max_iters must be at least 1");
  require(alpha > 0 && alpha < 2, "alpha must lie in (0, 2)");
  require(rho > 0 && std::isfinite(rho), "rho must be positive");
  require(sigma > 0 && std::isfinite(sigma), "sigma must be positive");
  require(eps_certificate > 0, "eps_certificate must be positive");
}

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::MaxItersInaccurate: return "inaccurate";
    case Status::Failed: return "failed";
  }
  return "?";
}

namespace {

void project_soc(Eigen::Ref<Eigen::VectorXd> z) {
  const double t = z[0];
  if (z.size() == 1) {
    z[0] = std::max(t, 0.0);
    return;
  }
  auto v = z.tail(z.size() - 1);
  const double nv = v.norm();
  if (nv <= t) return;
  if (nv <= -t) {
    z.setZero();
    return;
  }
  const double a = 0.5 * (nv + t);
  z[0] = a;
  v *= a / nv;
}

}  // namespace

Eigen::VectorXd project_cone(const Eigen::VectorXd& point, const ConeSpec& cones, bool dual) {
  if (point.size() != cones.total()) {
    throw Error(ErrorCode::DimensionMismatch, "point does not match the cone dimension");
  }
  Eigen::VectorXd z = point;
  if (!dual) z.head(cones.zero).setZero();
  Eigen::Index k = cones.zero;
  for (int i = 0; i < cones.nonneg; ++i, ++k) z[k] = std::max(z[k], 0.0);
  for (int d : cones.soc) {
    project_soc(z.segment(k, d));
    k += d;
  }
  return z;
}

Residuals residuals(const ConeProgram& prog, const Eigen::VectorXd& x, const Eigen::VectorXd& s,
                    const Eigen::VectorXd& y) {
  const Eigen::SparseMatrix<double> a = prog.a_matrix();
  Residuals r;
  r.primal = (a * x + s - prog.b).norm() / (1.0 + prog.b.norm());
  r.dual = (Eigen::VectorXd(a.transpose() * y) + prog.c).norm() / (1.0 + prog.c.norm());
  const double cx = prog.c.dot(x);
  const double by = prog.b.dot(y);
  r.gap = std::abs(cx + by) / (1.0 + std::abs(cx) + std::abs(by));
  return r;
}

namespace {

// Distance from v to K (or K* with `dual`).
double cone_distance(const Eigen::VectorXd& v, const ConeSpec& cones, bool dual) {
  return (v - project_cone(v, cones, dual)).norm();
}

ConeSolution solve_empty(const ConeProgram& prog, const SolverSettings& settings) {
  ConeSolution sol;
  sol.x = Eigen::VectorXd::Zero(0);
  const Eigen::VectorXd pb = project_cone(prog.b, prog.cones);
  if ((prog.b - pb).norm() <= settings.eps_primal * (1.0 + prog.b.norm())) {
    sol.status = Status::Optimal;
    sol.s = prog.b;
    sol.y = Eigen::VectorXd::Zero(prog.num_rows());
  } else {
    // b - P(b) lies in the polar cone, so y = P(b) - b is in K* with b'y < 0.
    sol.status = Status::Infeasible;
    sol.s = pb;
    sol.certificate = pb - prog.b;
    sol.y = sol.certificate;
  }
  sol.residuals = residuals(prog, sol.x, sol.s, sol.y);
  return sol;
}

}  // namespace

ConeSolution solve_cone(const ConeProgram& prog, const SolverSettings& settings) {
  settings.validate();
  prog.validate();
  if (prog.num_vars() == 0) return solve_empty(prog, settings);

  const int n = prog.num_vars();
  const int m = prog.num_rows();
  const Eigen::SparseMatrix<double> a = prog.a_matrix();
  const Eigen::SparseMatrix<double> at = a.transpose();
  const Eigen::VectorXd& b = prog.b;
  const Eigen::VectorXd& c = prog.c;

  Eigen::VectorXd rho = Eigen::VectorXd::Constant(m, settings.rho);
  rho.head(prog.cones.zero).setConstant(1e3 * settings.rho);
  const Eigen::VectorXd rho_inv = rho.cwiseInverse();

  // (sigma I + A' R A) x~ = sigma x - c + A' (R (b - s) + lambda)
  Eigen::MatrixXd kkt = Eigen::MatrixXd(at * rho.asDiagonal() * a);
  kkt.diagonal().array() += settings.sigma;
  const Eigen::LLT<Eigen::MatrixXd> llt(kkt);
  ConeSolution sol;
  if (llt.info() != Eigen::Success) {
    sol.status = Status::Failed;
    return sol;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  const double alpha = settings.alpha;
  const double norm_b = b.norm();
  const double norm_c = c.norm();

  for (int it = 1; it <= settings.max_iters; ++it) {
    const Eigen::VectorXd x_prev = x;
    const Eigen::VectorXd lambda_prev = lambda;

    Eigen::VectorXd rhs = settings.sigma * x - c +
                          at * (rho.cwiseProduct(b - s) + lambda);
    Eigen::VectorXd xt = llt.solve(rhs);
    Eigen::VectorXd st = b - a * xt;

    x = alpha * xt + (1.0 - alpha) * x;
    const Eigen::VectorXd sr = alpha * st + (1.0 - alpha) * s;
    s = project_cone(sr + rho_inv.cwiseProduct(lambda), prog.cones);
    lambda += rho.cwiseProduct(sr - s);

    if (!x.allFinite() || !lambda.allFinite()) {
      sol.status = Status::Failed;
      sol.iterations = it;
      break;
    }

    const Eigen::VectorXd y = -lambda;
    const Eigen::VectorXd ax = a * x;
    const Eigen::VectorXd aty = at * y;
    Residuals r;
    r.primal = (ax + s - b).norm() / (1.0 + norm_b);
    r.dual = (aty + c).norm() / (1.0 + norm_c);
    const double cx = c.dot(x);
    const double by = b.dot(y);
    r.gap = std::abs(cx + by) / (1.0 + std::abs(cx) + std::abs(by));

    sol.x = x;
    sol.s = s;
    sol.y = y;
    sol.iterations = it;
    sol.residuals = r;
    if (r.primal <= settings.eps_primal && r.dual <= settings.eps_dual &&
        r.gap <= settings.eps_gap) {
      sol.status = Status::Optimal;
      return sol;
    }

    // Infeasibility: dy in K*, A'dy ~ 0, b'dy < 0, scaled so that b'dy = -1.
    const Eigen::VectorXd dy = lambda_prev - lambda;
    const double bdy = b.dot(dy);
    if (bdy < 0 && dy.norm() > 1e-12 * (1.0 + lambda.norm())) {
      const Eigen::VectorXd cert = dy / -bdy;
      if ((at * cert).norm() <= settings.eps_certificate &&
          cone_distance(cert, prog.cones, true) <= settings.eps_certificate * (1.0 + cert.norm())) {
        sol.status = Status::Infeasible;
        sol.certificate = cert;
        return sol;
      }
    }
    // Unboundedness: -A dx in K, c'dx < 0, scaled so that c'dx = -1.
    const Eigen::VectorXd dx = x - x_prev;
    const double cdx = c.dot(dx);
    if (cdx < 0 && dx.norm() > 1e-12 * (1.0 + x.norm())) {
      const Eigen::VectorXd cert = dx / -cdx;
      const Eigen::VectorXd neg_ax = -(a * cert);
      if (cone_distance(neg_ax, prog.cones, false) <= settings.eps_certificate) {
        sol.status = Status::Unbounded;
        sol.certificate = cert;
        return sol;
      }
    }
  }
  if (sol.status != Status::Failed) sol.status = Status::MaxItersInaccurate;
  return sol;
}

}  // namespace dcpx
