// Primal log-barrier path following with damped Newton centering.
//
// Equality constraints are eliminated up front (x = x0 + F y with F an
// orthonormal nullspace basis). Phase I shifts every cone by s e, with e in
// the cone interior, and minimizes s until a strictly feasible point appears.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "nomamec/conic.hpp"

namespace nomamec::conic {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Affine {
  std::vector<int> idx;
  std::vector<double> val;
  double c = 0.0;

  double eval(const VectorXd& y) const { return c + linear(y); }
  double linear(const VectorXd& d) const {
    double s = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) s += val[i] * d[idx[i]];
    return s;
  }
  void add_term(int i, double v) {
    for (std::size_t p = 0; p < idx.size(); ++p)
      if (idx[p] == i) {
        val[p] += v;
        return;
      }
    idx.push_back(i);
    val.push_back(v);
  }
};

struct SocRows {
  Affine t;
  std::vector<Affine> v;
};

struct ExpRows {
  Affine a, b, c;
};

/// A barrier problem in the reduced variables y.
struct Reduced {
  int dim = 0;
  Affine objective;
  std::vector<Affine> lin;  // row <= 0
  std::vector<SocRows> soc;
  std::vector<ExpRows> exp;

  double nu() const {
    return static_cast<double>(lin.size()) + 2.0 * static_cast<double>(soc.size()) +
           3.0 * static_cast<double>(exp.size());
  }
};

/// Affine map from the original variables x to the reduced variables y.
struct Elimination {
  bool identity = true;
  VectorXd x0;
  MatrixXd basis;  // n x dim

  VectorXd to_x(const VectorXd& y) const { return identity ? y : VectorXd(x0 + basis * y); }
  VectorXd to_y(const VectorXd& x) const {
    return identity ? x : VectorXd(basis.transpose() * (x - x0));
  }

  Affine map(const LinearExpr& e, int dim) const {
    Affine a;
    a.c = e.constant();
    if (identity) {
      for (const auto& [i, v] : e.terms()) {
        a.idx.push_back(static_cast<int>(i));
        a.val.push_back(v);
      }
      return a;
    }
    VectorXd row = VectorXd::Zero(dim);
    for (const auto& [i, v] : e.terms()) {
      a.c += v * x0[static_cast<Eigen::Index>(i)];
      row += v * basis.row(static_cast<Eigen::Index>(i)).transpose();
    }
    const double scale = row.cwiseAbs().maxCoeff();
    for (int j = 0; j < dim; ++j)
      if (std::abs(row[j]) > 1e-14 * std::max(scale, 1.0)) {
        a.idx.push_back(j);
        a.val.push_back(row[j]);
      }
    return a;
  }
};

/// Returns false when the equalities are inconsistent.
bool eliminate(const ConicProgram& program, Elimination& elim, int& dim) {
  const auto n = static_cast<Eigen::Index>(program.num_variables());
  const auto& eqs = program.equalities();
  if (eqs.empty()) {
    elim.identity = true;
    dim = static_cast<int>(n);
    return true;
  }
  MatrixXd a = MatrixXd::Zero(static_cast<Eigen::Index>(eqs.size()), n);
  VectorXd rhs(static_cast<Eigen::Index>(eqs.size()));
  for (std::size_t r = 0; r < eqs.size(); ++r) {
    for (const auto& [i, v] : eqs[r].terms()) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) += v;
    rhs[static_cast<Eigen::Index>(r)] = -eqs[r].constant();
  }
  Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& sv = svd.singularValues();
  const double tol = 1e-12 * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > tol) ++rank;
  svd.setThreshold(tol / std::max(1.0, sv.size() > 0 ? sv[0] : 1.0));
  elim.identity = false;
  elim.x0 = svd.solve(rhs);
  if ((a * elim.x0 - rhs).norm() > 1e-9 * std::max(1.0, rhs.norm())) return false;
  elim.basis = svd.matrixV().rightCols(n - rank);
  dim = static_cast<int>(n - rank);
  return true;
}

Reduced reduce(const ConicProgram& program, const Elimination& elim, int dim, double ball_radius) {
  Reduced r;
  r.dim = dim;
  r.objective = elim.map(program.objective(), dim);
  for (const auto& e : program.inequalities()) r.lin.push_back(elim.map(e, dim));
  for (const auto& cone : program.soc_cones()) {
    SocRows s;
    s.t = elim.map(cone.t, dim);
    for (const auto& v : cone.v) s.v.push_back(elim.map(v, dim));
    r.soc.push_back(std::move(s));
  }
  for (const auto& cone : program.exp_cones())
    r.exp.push_back({elim.map(cone.a, dim), elim.map(cone.b, dim), elim.map(cone.c, dim)});
  // Bounding ball keeps the barrier problem bounded below.
  if (dim > 0) {
    SocRows ball;
    ball.t.c = ball_radius;
    for (int j = 0; j < dim; ++j) {
      Affine v;
      v.idx = {j};
      v.val = {1.0};
      ball.v.push_back(std::move(v));
    }
    r.soc.push_back(std::move(ball));
  }
  return r;
}

/// Phase I problem: one extra variable s (index dim), every cone shifted by s e.
Reduced phase_one(const Reduced& base) {
  Reduced r;
  r.dim = base.dim + 1;
  const int s = base.dim;
  r.objective.idx = {s};
  r.objective.val = {1.0};
  for (Affine row : base.lin) {
    row.add_term(s, -1.0);
    r.lin.push_back(std::move(row));
  }
  {
    Affine lower;  // -s - 1 <= 0
    lower.idx = {s};
    lower.val = {-1.0};
    lower.c = -1.0;
    r.lin.push_back(std::move(lower));
  }
  for (SocRows cone : base.soc) {
    cone.t.add_term(s, 1.0);
    r.soc.push_back(std::move(cone));
  }
  for (ExpRows cone : base.exp) {
    cone.a.add_term(s, -1.0);
    cone.b.add_term(s, 1.0);
    cone.c.add_term(s, 1.0);
    r.exp.push_back(std::move(cone));
  }
  return r;
}

bool in_domain(const Reduced& r, const VectorXd& y) {
  for (const auto& row : r.lin)
    if (!(row.eval(y) < 0.0)) return false;
  for (const auto& cone : r.soc) {
    const double t = cone.t.eval(y);
    if (!(t > 0.0)) return false;
    double sq = 0.0;
    for (const auto& v : cone.v) sq += std::pow(v.eval(y), 2);
    if (!(t * t - sq > 0.0)) return false;
  }
  for (const auto& cone : r.exp) {
    const double b = cone.b.eval(y), c = cone.c.eval(y);
    if (!(b > 0.0) || !(c > 0.0)) return false;
    if (!(b * std::log(c / b) - cone.a.eval(y) > 0.0)) return false;
  }
  return true;
}

/// Barrier change from y to y + d, summed as log ratios so that it stays
/// accurate when the barrier itself is large. +inf when y + d leaves the domain.
double barrier_change(const Reduced& r, const VectorXd& y, const VectorXd& d) {
  constexpr double kOut = std::numeric_limits<double>::infinity();
  // -log(1 + rel), with rel the relative change of a positive slack.
  auto term = [](double rel) { return rel > -1.0 ? -std::log1p(rel) : kOut; };
  double f = 0.0;
  for (const auto& row : r.lin) f += term(-row.linear(d) / -row.eval(y));
  for (const auto& cone : r.soc) {
    const double t = cone.t.eval(y), dt = cone.t.linear(d);
    if (!(t + dt > 0.0)) return kOut;
    double g = t * t, dg = dt * (2.0 * t + dt);
    for (const auto& v : cone.v) {
      const double vi = v.eval(y), dv = v.linear(d);
      g -= vi * vi;
      dg -= dv * (2.0 * vi + dv);
    }
    f += term(dg / g);
  }
  for (const auto& cone : r.exp) {
    const double b = cone.b.eval(y), c = cone.c.eval(y);
    const double db = cone.b.linear(d), dc = cone.c.linear(d), da = cone.a.linear(d);
    if (!(b + db > 0.0) || !(c + dc > 0.0)) return kOut;
    const double psi = b * std::log(c / b) - cone.a.eval(y);
    const double dlog = std::log1p(dc / c) - std::log1p(db / b);
    const double dpsi = db * std::log((c + dc) / (b + db)) + b * dlog - da;
    f += term(dpsi / psi) + term(db / b) + term(dc / c);
  }
  return std::isnan(f) ? kOut : f;
}

/// Accumulates w * row^T g into grad.
void add_grad(VectorXd& grad, const Affine& row, double g) {
  for (std::size_t i = 0; i < row.idx.size(); ++i) grad[row.idx[i]] += g * row.val[i];
}

/// Accumulates h * p q^T into hess.
void add_hess(MatrixXd& hess, const Affine& p, const Affine& q, double h) {
  for (std::size_t i = 0; i < p.idx.size(); ++i) {
    const double pi = h * p.val[i];
    for (std::size_t j = 0; j < q.idx.size(); ++j) hess(p.idx[i], q.idx[j]) += pi * q.val[j];
  }
}

/// Gradient and Hessian of the barrier (without the objective term).
void barrier_derivatives(const Reduced& r, const VectorXd& y, VectorXd& grad, MatrixXd& hess) {
  grad.setZero(r.dim);
  hess.setZero(r.dim, r.dim);
  for (const auto& row : r.lin) {
    const double s = -row.eval(y);
    add_grad(grad, row, 1.0 / s);
    add_hess(hess, row, row, 1.0 / (s * s));
  }
  std::vector<const Affine*> rows;
  std::vector<double> vals, ds;
  for (const auto& cone : r.soc) {
    rows.clear();
    vals.clear();
    rows.push_back(&cone.t);
    vals.push_back(cone.t.eval(y));
    for (const auto& v : cone.v) {
      rows.push_back(&v);
      vals.push_back(v.eval(y));
    }
    double s = vals[0] * vals[0];
    for (std::size_t i = 1; i < vals.size(); ++i) s -= vals[i] * vals[i];
    // phi = -log s, ds = (2t, -2v).
    ds.assign(vals.size(), 0.0);
    ds[0] = 2.0 * vals[0];
    for (std::size_t i = 1; i < vals.size(); ++i) ds[i] = -2.0 * vals[i];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      add_grad(grad, *rows[i], -ds[i] / s);
      if (rows[i]->idx.empty()) continue;
      for (std::size_t j = 0; j < rows.size(); ++j) {
        double h = ds[i] * ds[j] / (s * s);
        if (i == j) h -= (i == 0 ? 2.0 : -2.0) / s;
        if (h != 0.0) add_hess(hess, *rows[i], *rows[j], h);
      }
    }
  }
  for (const auto& cone : r.exp) {
    const double a = cone.a.eval(y), b = cone.b.eval(y), c = cone.c.eval(y);
    const double lg = std::log(c / b);
    const double psi = b * lg - a;
    const double dpsi[3] = {-1.0, lg - 1.0, b / c};
    const double d2psi[3][3] = {{0.0, 0.0, 0.0}, {0.0, -1.0 / b, 1.0 / c}, {0.0, 1.0 / c, -b / (c * c)}};
    const double extra_g[3] = {0.0, -1.0 / b, -1.0 / c};
    const double extra_h[3] = {0.0, 1.0 / (b * b), 1.0 / (c * c)};
    const Affine* args[3] = {&cone.a, &cone.b, &cone.c};
    for (int i = 0; i < 3; ++i) {
      add_grad(grad, *args[i], -dpsi[i] / psi + extra_g[i]);
      if (args[i]->idx.empty()) continue;
      for (int j = 0; j < 3; ++j) {
        double h = dpsi[i] * dpsi[j] / (psi * psi) - d2psi[i][j] / psi;
        if (i == j) h += extra_h[i];
        if (h != 0.0) add_hess(hess, *args[i], *args[j], h);
      }
    }
  }
}

VectorXd objective_vector(const Reduced& r) {
  VectorXd c = VectorXd::Zero(r.dim);
  add_grad(c, r.objective, 1.0);
  return c;
}

bool newton_direction(const MatrixXd& hess, const VectorXd& rhs, VectorXd& step) {
  Eigen::LDLT<MatrixXd> ldlt(hess);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    step = ldlt.solve(rhs);
    if (step.allFinite()) return true;
  }
  const double scale = std::max(hess.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  for (double reg = 1e-14; reg < 1.0; reg *= 100.0) {
    MatrixXd h = hess;
    h.diagonal().array() += reg * scale;
    Eigen::LLT<MatrixXd> llt(h);
    if (llt.info() != Eigen::Success) continue;
    step = llt.solve(rhs);
    if (step.allFinite()) return true;
  }
  return false;
}

enum class PathOutcome { Converged, Feasible, Infeasible, Failure };

struct PathResult {
  PathOutcome outcome = PathOutcome::Failure;
  double gap = kNaN;
  int steps = 0;
};

/// Follows the central path of r from the strictly feasible point y.
/// In phase-one mode the last coordinate is the shift s.
PathResult follow_path(const Reduced& r, VectorXd& y, const SolverOptions& opt, bool phase_one,
                       int step_budget) {
  PathResult out;
  const VectorXd c = objective_vector(r);
  const double nu = r.nu();
  VectorXd grad, step, rhs;
  MatrixXd hess;

  // Last completed centering; a later breakdown close to the target gap
  // returns this point instead of failing.
  VectorXd centered;
  double centered_gap = std::numeric_limits<double>::infinity();
  auto fail = [&]() {
    if (!phase_one && centered.size() == y.size() &&
        centered_gap <= 10.0 * (opt.abs_gap + opt.rel_gap * std::abs(r.objective.eval(centered)))) {
      y = centered;
      out.gap = centered_gap;
      out.outcome = PathOutcome::Converged;
    } else {
      out.outcome = PathOutcome::Failure;
    }
    return out;
  };

  double t = 1.0;
  if (!phase_one) {
    // Start on the part of the path best aligned with the barrier gradient.
    barrier_derivatives(r, y, grad, hess);
    VectorXd hc, hg;
    if (newton_direction(hess, c, hc) && newton_direction(hess, grad, hg)) {
      const double den = c.dot(hc);
      const double t_fit = den > 0.0 ? -c.dot(hg) / den : 1.0;
      if (std::isfinite(t_fit)) t = std::clamp(t_fit, 1.0, 1e6);
    }
  }

  for (;;) {
    // Centering by damped Newton.
    int inner = 0;
    double previous_lambda = std::numeric_limits<double>::infinity();
    for (;;) {
      if (out.steps >= step_budget) {
        return fail();
      }
      barrier_derivatives(r, y, grad, hess);
      rhs = -(t * c + grad);
      if (!newton_direction(hess, rhs, step)) {
        return fail();
      }
      const double lambda2 = rhs.dot(step);
      const double lambda = std::sqrt(std::max(lambda2, 0.0));
      if (!std::isfinite(lambda)) {
        return fail();
      }
      if (lambda < 1e-7) break;
      // At large t the decrement bottoms out at the roundoff of t c + grad;
      // once it stops shrinking the point is as centered as it gets.
      if (lambda < 1e-3 && lambda > 0.5 * previous_lambda) break;
      previous_lambda = lambda;
      // Backtracking on the centering merit t c'y + barrier; the Newton
      // decrement gives the directional derivative -lambda^2.
      double alpha = 1.0;
      VectorXd trial = y + step;
      int shrink = 0;
      for (; shrink < 60; ++shrink) {
        const VectorXd d = alpha * step;
        const double change = t * c.dot(d) + barrier_change(r, y, d);
        if (std::isfinite(change) && change <= -0.25 * alpha * lambda2) break;
        alpha *= 0.5;
        trial = y + alpha * step;
      }
      if (shrink == 60) {
        // Roundoff floor of the merit: fall back to the damped step.
        alpha = lambda > 0.25 ? 1.0 / (1.0 + lambda) : 1.0;
        trial = y + alpha * step;
        while (!in_domain(r, trial) && alpha > 1e-18) {
          alpha *= 0.5;
          trial = y + alpha * step;
        }
        if (!in_domain(r, trial)) {
          return fail();
        }
      }
      const double moved = (alpha * step).cwiseAbs().maxCoeff();
      y = trial;
      ++out.steps;
      ++inner;
      if (phase_one && y[r.dim - 1] < 0.0) {
        out.outcome = PathOutcome::Feasible;
        return out;
      }
      // Roundoff floor: the step no longer changes the iterate.
      if (moved <= 1e-15 * std::max(1.0, y.cwiseAbs().maxCoeff())) break;
      if (inner > 200) {
        if (lambda < 1e-3) break;
        return fail();
      }
    }

    out.gap = nu / t;
    centered = y;
    centered_gap = out.gap;
    const double obj = r.objective.eval(y);
    if (phase_one) {
      if (y[r.dim - 1] < 0.0) {
        out.outcome = PathOutcome::Feasible;
        return out;
      }
      if (y[r.dim - 1] - out.gap > 0.0) {
        out.outcome = PathOutcome::Infeasible;
        return out;
      }
      if (out.gap <= 1e-13) {
        // s* is numerically zero: no strictly feasible point.
        out.outcome = PathOutcome::Infeasible;
        return out;
      }
    } else if (out.gap <= opt.abs_gap + opt.rel_gap * std::abs(obj)) {
      out.outcome = PathOutcome::Converged;
      return out;
    }
    t *= opt.mu;
  }
}

/// Smallest shift making y strictly interior for the phase-one problem.
double initial_shift(const Reduced& base, const VectorXd& y) {
  double s = 0.0;
  for (const auto& row : base.lin) s = std::max(s, row.eval(y));
  for (const auto& cone : base.soc) {
    double sq = 0.0;
    for (const auto& v : cone.v) sq += std::pow(v.eval(y), 2);
    s = std::max(s, std::sqrt(sq) - cone.t.eval(y));
  }
  for (const auto& cone : base.exp) {
    s = std::max({s, -cone.b.eval(y), -cone.c.eval(y), cone.a.eval(y)});
  }
  return 2.0 * s + 1.0;
}

}  // namespace

SolveResult solve(const ConicProgram& program, const SolverOptions& options) {
  SolveResult result;
  Elimination elim;
  int dim = 0;
  if (!eliminate(program, elim, dim)) {
    result.status = SolveStatus::Infeasible;
    return result;
  }
  const Reduced base = reduce(program, elim, dim, options.ball_radius);

  auto finish = [&](const VectorXd& y, double gap) {
    const VectorXd x = elim.to_x(y);
    result.x.assign(x.data(), x.data() + x.size());
    result.objective = program.objective().evaluate(result.x);
    result.gap = gap;
    if (dim > 0 && y.norm() >= 0.5 * options.ball_radius) result.status = SolveStatus::NumericalFailure;
  };

  if (dim == 0) {
    const VectorXd x = elim.to_x(VectorXd(0));
    const std::vector<double> xv(x.data(), x.data() + x.size());
    result.status = program.max_violation(xv) <= 1e-9 ? SolveStatus::Optimal : SolveStatus::Infeasible;
    finish(VectorXd(0), 0.0);
    return result;
  }

  VectorXd y = VectorXd::Zero(dim);
  bool have_start = false;
  if (options.warm_start && options.warm_start->size() == program.num_variables()) {
    const VectorXd ws = Eigen::Map<const VectorXd>(options.warm_start->data(),
                                                   static_cast<Eigen::Index>(options.warm_start->size()));
    VectorXd cand = elim.to_y(ws);
    if (in_domain(base, cand)) {
      y = cand;
      have_start = true;
      result.warm_started = true;
    }
  }
  if (!have_start && in_domain(base, y)) have_start = true;

  int budget = options.max_newton_steps;
  if (!have_start) {
    const Reduced p1 = phase_one(base);
    VectorXd z(dim + 1);
    z.head(dim) = y;
    z[dim] = initial_shift(base, y);
    while (!in_domain(p1, z) && z[dim] < 1e12) z[dim] *= 2.0;
    if (!in_domain(p1, z)) {
      result.status = SolveStatus::NumericalFailure;
      return result;
    }
    const PathResult pr = follow_path(p1, z, options, true, budget);
    result.newton_steps += pr.steps;
    budget -= pr.steps;
    if (pr.outcome == PathOutcome::Infeasible) {
      result.status = SolveStatus::Infeasible;
      return result;
    }
    if (pr.outcome != PathOutcome::Feasible) {
      result.status = SolveStatus::NumericalFailure;
      return result;
    }
    y = z.head(dim);
    if (!in_domain(base, y)) {
      result.status = SolveStatus::NumericalFailure;
      return result;
    }
  }

  const PathResult pr = follow_path(base, y, options, false, budget);
  result.newton_steps += pr.steps;
  result.status = pr.outcome == PathOutcome::Converged ? SolveStatus::Optimal : SolveStatus::NumericalFailure;
  finish(y, pr.gap);
  return result;
}

}  // namespace nomamec::conic
