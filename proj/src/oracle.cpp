#include "dcpx/oracle.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "dcpx/error.hpp"

namespace dcpx {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kTol = 1e-9;
constexpr long kMaxSubsets = 200000;

// Orthonormal basis of the row space of m.
MatrixXd row_space(const MatrixXd& m, int cols) {
  if (m.rows() == 0) return MatrixXd(cols, 0);
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = kTol * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  int r = 0;
  while (r < sv.size() && sv[r] > cutoff) ++r;
  return svd.matrixV().leftCols(r);
}

int rank_of(const MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(m);
  qr.setThreshold(kTol);
  return static_cast<int>(qr.rank());
}

long choose(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > kMaxSubsets) return kMaxSubsets + 1;
  }
  return r;
}

struct Vertex {
  VectorXd z;
  double value = 0.0;
};

enum class Enumeration { Found, None, TooLarge };

// Best vertex of {z : E z = be, G z <= h} under cost g, assuming [E; G] has
// full column rank.
Enumeration best_vertex(const MatrixXd& e, const VectorXd& be, const MatrixXd& g,
                        const VectorXd& h, const VectorXd& cost, Vertex& best) {
  const int r = static_cast<int>(e.cols());
  const int mi = static_cast<int>(g.rows());
  const int k = r - rank_of(e);
  if (k < 0 || k > mi) return Enumeration::None;
  if (choose(mi, k) > kMaxSubsets) return Enumeration::TooLarge;
  const double scale = 1.0 + std::max(be.size() ? be.lpNorm<Eigen::Infinity>() : 0.0,
                                      h.size() ? h.lpNorm<Eigen::Infinity>() : 0.0);
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  bool found = false;
  while (true) {
    MatrixXd m(e.rows() + k, r);
    VectorXd rhs(e.rows() + k);
    m.topRows(e.rows()) = e;
    rhs.head(e.rows()) = be;
    for (int i = 0; i < k; ++i) {
      m.row(e.rows() + i) = g.row(idx[static_cast<std::size_t>(i)]);
      rhs[e.rows() + i] = h[idx[static_cast<std::size_t>(i)]];
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(m);
    qr.setThreshold(kTol);
    if (qr.rank() == r) {
      VectorXd z = qr.solve(rhs);
      const bool consistent = (m * z - rhs).norm() <= 1e-8 * scale;
      const bool feasible = mi == 0 || (g * z - h).maxCoeff() <= 1e-8 * scale;
      if (consistent && feasible) {
        const double v = cost.dot(z);
        if (!found || v < best.value) {
          best = Vertex{z, v};
          found = true;
        }
      }
    }
    // Next combination.
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == mi - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return found ? Enumeration::Found : Enumeration::None;
}

// Dual multipliers supported on the rows active at x: least squares for
// A_act' y = -c.
VectorXd active_duals(const ConeProgram& prog, const MatrixXd& a, const VectorXd& x) {
  const int m = prog.num_rows();
  const VectorXd s = prog.b - a * x;
  const double tol = 1e-7 * (1.0 + prog.b.lpNorm<Eigen::Infinity>());
  std::vector<int> active;
  for (int i = 0; i < m; ++i) {
    if (i < prog.cones.zero || std::abs(s[i]) <= tol) active.push_back(i);
  }
  VectorXd y = VectorXd::Zero(m);
  if (active.empty()) return y;
  MatrixXd at(a.cols(), static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j) at.col(static_cast<Eigen::Index>(j)) = a.row(active[j]).transpose();
  VectorXd ya = at.completeOrthogonalDecomposition().solve(-prog.c);
  for (std::size_t j = 0; j < active.size(); ++j) y[active[j]] = ya[static_cast<Eigen::Index>(j)];
  return y;
}

ConeSolution finish(const ConeProgram& prog, const MatrixXd& a, Status status, VectorXd x,
                    VectorXd y) {
  ConeSolution sol;
  sol.status = status;
  sol.x = std::move(x);
  sol.s = prog.b - a * sol.x;
  sol.y = std::move(y);
  sol.residuals = residuals(prog, sol.x, sol.s, sol.y);
  return sol;
}

ConeSolution status_only(const ConeProgram& prog, Status status) {
  ConeSolution sol;
  sol.status = status;
  sol.x = VectorXd::Zero(prog.num_vars());
  sol.s = VectorXd::Zero(prog.num_rows());
  sol.y = VectorXd::Zero(prog.num_rows());
  return sol;
}

std::optional<ConeSolution> solve_lp(const ConeProgram& prog, const MatrixXd& a) {
  const int n = prog.num_vars();
  const int mz = prog.cones.zero;
  const int mi = prog.cones.nonneg;
  const MatrixXd q = row_space(a, n);
  const VectorXd cz = q.transpose() * prog.c;
  const bool c_leaks = (prog.c - q * cz).norm() > 1e-9 * (1.0 + prog.c.norm());

  const MatrixXd e = a.topRows(mz) * q;
  const VectorXd be = prog.b.head(mz);
  const MatrixXd g = a.bottomRows(mi) * q;
  const VectorXd h = prog.b.tail(mi);

  if (q.cols() == 0) {
    // A = 0: feasible iff b is in K, and then every x is optimal or c leaks.
    const VectorXd pb = project_cone(prog.b, prog.cones);
    if ((prog.b - pb).norm() > 1e-9 * (1.0 + prog.b.norm())) {
      return status_only(prog, Status::Infeasible);
    }
    if (c_leaks) return status_only(prog, Status::Unbounded);
    return finish(prog, a, Status::Optimal, VectorXd::Zero(n), VectorXd::Zero(prog.num_rows()));
  }

  Vertex best;
  Enumeration res = best_vertex(e, be, g, h, cz, best);
  if (res == Enumeration::TooLarge) return std::nullopt;
  if (res == Enumeration::None) return status_only(prog, Status::Infeasible);
  if (c_leaks) return status_only(prog, Status::Unbounded);

  // Recession direction with c'd = -1.
  if (q.cols() > 0) {
    MatrixXd e2(e.rows() + 1, e.cols());
    e2.topRows(e.rows()) = e;
    e2.bottomRows(1) = cz.transpose();
    VectorXd be2 = VectorXd::Zero(e.rows() + 1);
    be2[e.rows()] = -1.0;
    Vertex ray;
    Enumeration rr = best_vertex(e2, be2, g, VectorXd::Zero(mi), VectorXd::Zero(e.cols()), ray);
    if (rr == Enumeration::TooLarge) return std::nullopt;
    if (rr == Enumeration::Found) return status_only(prog, Status::Unbounded);
  }
  VectorXd x = q * best.z;
  VectorXd y = active_duals(prog, a, x);
  return finish(prog, a, Status::Optimal, std::move(x), std::move(y));
}

// Log-barrier for s = h - M w in (nonneg^k x SOC...).
struct Barrier {
  VectorXd h;
  MatrixXd m;
  int nonneg = 0;
  std::vector<int> soc;

  double degree() const { return nonneg + 2.0 * static_cast<double>(soc.size()); }

  bool interior(const VectorXd& s) const {
    for (int i = 0; i < nonneg; ++i) {
      if (!(s[i] > 0)) return false;
    }
    Eigen::Index k = nonneg;
    for (int d : soc) {
      const double t = s[k];
      const double vn = d > 1 ? s.segment(k + 1, d - 1).norm() : 0.0;
      if (!(t > vn)) return false;
      k += d;
    }
    return true;
  }

  double value(const VectorXd& s) const {
    double v = 0.0;
    for (int i = 0; i < nonneg; ++i) v -= std::log(s[i]);
    Eigen::Index k = nonneg;
    for (int d : soc) {
      const double t = s[k];
      const double vv = d > 1 ? s.segment(k + 1, d - 1).squaredNorm() : 0.0;
      v -= std::log(t * t - vv);
      k += d;
    }
    return v;
  }

  // Gradient and Hessian with respect to s.
  void derivatives(const VectorXd& s, VectorXd& grad, MatrixXd& hess) const {
    const Eigen::Index m = s.size();
    grad = VectorXd::Zero(m);
    hess = MatrixXd::Zero(m, m);
    for (int i = 0; i < nonneg; ++i) {
      grad[i] = -1.0 / s[i];
      hess(i, i) = 1.0 / (s[i] * s[i]);
    }
    Eigen::Index k = nonneg;
    for (int d : soc) {
      VectorXd js = s.segment(k, d);
      js.tail(d - 1) *= -1.0;
      const double dd = s.segment(k, d).dot(js);
      grad.segment(k, d) = -2.0 / dd * js;
      MatrixXd jm = MatrixXd::Identity(d, d);
      jm.bottomRightCorner(d - 1, d - 1) *= -1.0;
      hess.block(k, k, d, d) = -2.0 / dd * jm + 4.0 / (dd * dd) * js * js.transpose();
      k += d;
    }
  }
};

enum class PathResult { Converged, Stopped, Diverged };

// Follows the central path of min cost'w + phi(h - M w)/t from a strictly
// feasible w. `stop` may end the run early after any Newton step.
PathResult central_path(const Barrier& bar, const VectorXd& cost, VectorXd& w, double& t_out,
                        const std::function<bool(const VectorXd&)>& stop) {
  double t = 1.0;
  const double nu = std::max(1.0, bar.degree());
  for (int outer = 0; outer < 200; ++outer) {
    for (int inner = 0; inner < 200; ++inner) {
      const VectorXd s = bar.h - bar.m * w;
      VectorXd gs;
      MatrixXd hs;
      bar.derivatives(s, gs, hs);
      const VectorXd grad = t * cost - bar.m.transpose() * gs;
      MatrixXd hess = bar.m.transpose() * hs * bar.m;
      hess.diagonal().array() += 1e-14 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
      const VectorXd dw = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(dw);
      if (!(decrement >= 0) || !dw.allFinite()) return PathResult::Diverged;
      if (decrement < 1e-12) break;
      const double f0 = t * cost.dot(w) + bar.value(s);
      double step = 1.0;
      VectorXd wn;
      bool accepted = false;
      for (int ls = 0; ls < 80; ++ls, step *= 0.5) {
        wn = w + step * dw;
        const VectorXd sn = bar.h - bar.m * wn;
        if (!bar.interior(sn)) continue;
        if (t * cost.dot(wn) + bar.value(sn) <= f0 - 0.25 * step * decrement) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
      w = wn;
      if (w.norm() > 1e12) return PathResult::Diverged;
      if (stop && stop(w)) {
        t_out = t;
        return PathResult::Stopped;
      }
    }
    t_out = t;
    if (nu / t < 1e-11 * (1.0 + std::abs(cost.dot(w)))) return PathResult::Converged;
    t *= 8.0;
  }
  return PathResult::Converged;
}

ConeSolution solve_barrier(const ConeProgram& prog, const MatrixXd& a) {
  const int n = prog.num_vars();
  const int mz = prog.cones.zero;
  const int mc = prog.num_rows() - mz;

  // Eliminate the equalities: x = x0 + N z.
  const MatrixXd ae = a.topRows(mz);
  const VectorXd be = prog.b.head(mz);
  VectorXd x0 = VectorXd::Zero(n);
  MatrixXd nbasis = MatrixXd::Identity(n, n);
  if (mz > 0) {
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(ae);
    cod.setThreshold(kTol);
    x0 = cod.solve(be);
    if ((ae * x0 - be).norm() > 1e-8 * (1.0 + be.norm())) {
      return status_only(prog, Status::Infeasible);
    }
    Eigen::JacobiSVD<MatrixXd> svd(ae, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = kTol * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
    int r = 0;
    while (r < sv.size() && sv[r] > cutoff) ++r;
    nbasis = svd.matrixV().rightCols(n - r);
  }

  const MatrixXd ac = a.bottomRows(mc);
  const MatrixXd mn = ac * nbasis;
  const MatrixXd q = row_space(mn, static_cast<int>(nbasis.cols()));
  const VectorXd cn = nbasis.transpose() * prog.c;
  const VectorXd cw = q.transpose() * cn;
  const bool c_leaks = (cn - q * cw).norm() > 1e-9 * (1.0 + prog.c.norm());

  Barrier bar;
  bar.h = prog.b.tail(mc) - ac * x0;
  bar.m = mn * q;
  bar.nonneg = prog.cones.nonneg;
  bar.soc = prog.cones.soc;
  const int r = static_cast<int>(q.cols());

  if (r == 0) {
    ConeSpec cs{0, bar.nonneg, bar.soc};
    if ((bar.h - project_cone(bar.h, cs)).norm() > 1e-9 * (1.0 + bar.h.norm())) {
      return status_only(prog, Status::Infeasible);
    }
    if (c_leaks) return status_only(prog, Status::Unbounded);
    return finish(prog, a, Status::Optimal, x0, active_duals(prog, a, x0));
  }

  VectorXd w = VectorXd::Zero(r);
  if (!bar.interior(bar.h)) {
    // Phase I: min tau s.t. s(w) + tau e in K, tau >= -1.
    Barrier p1;
    p1.nonneg = bar.nonneg + 1;
    p1.soc = bar.soc;
    p1.h = VectorXd(mc + 1);
    p1.m = MatrixXd::Zero(mc + 1, r + 1);
    VectorXd e = VectorXd::Zero(mc);
    e.head(bar.nonneg).setOnes();
    Eigen::Index k = bar.nonneg;
    for (int d : bar.soc) {
      e[k] = 1.0;
      k += d;
    }
    // Row 0 is tau + 1 >= 0; the rest keep their order after it.
    p1.h[0] = 1.0;
    p1.m(0, r) = -1.0;
    p1.h.tail(mc) = bar.h;
    p1.m.block(1, 0, mc, r) = bar.m;
    p1.m.block(1, r, mc, 1) = -e;
    double tau0 = 0.0;
    for (int i = 0; i < bar.nonneg; ++i) tau0 = std::max(tau0, -bar.h[i]);
    k = bar.nonneg;
    for (int d : bar.soc) {
      const double vn = d > 1 ? bar.h.segment(k + 1, d - 1).norm() : 0.0;
      tau0 = std::max(tau0, vn - bar.h[k]);
      k += d;
    }
    VectorXd wt = VectorXd::Zero(r + 1);
    wt[r] = tau0 + 1.0;
    VectorXd cost = VectorXd::Zero(r + 1);
    cost[r] = 1.0;
    double t = 0.0;
    auto feasible = [&](const VectorXd& v) { return bar.interior(bar.h - bar.m * v.head(r)); };
    PathResult pr = central_path(p1, cost, wt, t, feasible);
    if (pr != PathResult::Stopped && !feasible(wt)) {
      // Feasible without an interior point: relax K by a tiny margin so the
      // barrier has room, which moves the optimum by O(margin * |y|).
      const double margin = 1e-7 * (1.0 + bar.h.norm());
      if (pr == PathResult::Diverged || wt[r] > margin) return status_only(prog, Status::Infeasible);
      bar.h += (wt[r] + 1e-10 * (1.0 + bar.h.norm())) * e;
    }
    w = wt.head(r);
  }
  if (c_leaks) return status_only(prog, Status::Unbounded);

  double t = 0.0;
  PathResult pr = central_path(bar, cw, w, t, nullptr);
  if (pr == PathResult::Diverged) return status_only(prog, Status::Unbounded);

  VectorXd x = x0 + nbasis * (q * w);
  const VectorXd s = bar.h - bar.m * w;
  VectorXd gs;
  MatrixXd hs;
  bar.derivatives(s, gs, hs);
  VectorXd y(prog.num_rows());
  y.tail(mc) = -gs / t;
  if (mz > 0) {
    // A_E' y_E = -c - A_C' y_C.
    const VectorXd rhs = -prog.c - ac.transpose() * y.tail(mc);
    y.head(mz) = ae.transpose().completeOrthogonalDecomposition().solve(rhs);
  }
  return finish(prog, a, Status::Optimal, std::move(x), std::move(y));
}

}  // namespace

ConeSolution oracle_solve(const ConeProgram& prog) {
  prog.validate();
  if (prog.num_vars() + prog.num_rows() > kOracleDimensionCap) {
    throw Error(ErrorCode::DimensionCapExceeded,
                "oracle accepts at most " + std::to_string(kOracleDimensionCap) +
                    " variables plus rows, got " +
                    std::to_string(prog.num_vars() + prog.num_rows()));
  }
  const MatrixXd a = MatrixXd(prog.a_matrix());
  if (prog.num_vars() == 0) {
    const VectorXd pb = project_cone(prog.b, prog.cones);
    const bool ok = (prog.b - pb).norm() <= 1e-9 * (1.0 + prog.b.norm());
    if (!ok) return status_only(prog, Status::Infeasible);
    return finish(prog, a, Status::Optimal, VectorXd::Zero(0), VectorXd::Zero(prog.num_rows()));
  }
  if (prog.cones.soc.empty()) {
    if (auto sol = solve_lp(prog, a)) return *sol;
  }
  return solve_barrier(prog, a);
}

}  // namespace dcpx
