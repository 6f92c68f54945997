#include "gahf/capillary_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

namespace gahf {

ContinuationSchedule ContinuationSchedule::halving(double t0, double t_min, double eps0, double eps_min) {
  if (!(t0 > 0.0) || !(t_min > 0.0) || t_min > t0) fail(ErrorKind::Parameter, "schedule: need 0 < t_min <= t0");
  if (!(eps0 > 0.0) || !(eps_min > 0.0) || eps_min > eps0)
    fail(ErrorKind::Parameter, "schedule: need 0 < eps_min <= eps0");
  ContinuationSchedule s;
  for (double t = t0; t >= t_min * (1.0 - 1e-12); t *= 0.5) s.t_values.push_back(t);
  if (s.t_values.back() > t_min * (1.0 + 1e-12)) s.t_values.push_back(t_min);
  for (double e = eps0; e >= eps_min * (1.0 - 1e-12); e *= 0.5) s.eps_values.push_back(e);
  if (s.eps_values.back() > eps_min * (1.0 + 1e-12)) s.eps_values.push_back(eps_min);
  return s;
}

void ContinuationSchedule::validate() const {
  auto decreasing = [](const std::vector<double>& v, const char* name) {
    if (v.empty()) fail(ErrorKind::Parameter, std::string("schedule: empty ") + name + " sequence");
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0)) fail(ErrorKind::Parameter, std::string("schedule: ") + name + " values must be positive");
      if (i > 0 && !(v[i] < v[i - 1]))
        fail(ErrorKind::Parameter, std::string("schedule: ") + name + " values must strictly decrease");
    }
  };
  decreasing(t_values, "t");
  decreasing(eps_values, "eps");
  if (!(newton_tol > 0.0) || !(krylov_tol > 0.0)) fail(ErrorKind::Parameter, "schedule: tolerances must be positive");
  if (max_newton < 1) fail(ErrorKind::Parameter, "schedule: max_newton must be positive");
  if (!(blow_down_factor > 0.0)) fail(ErrorKind::Parameter, "schedule: blow-down factor must be positive");
}

std::string SolveTrace::table() const {
  std::ostringstream out;
  out << std::left << std::setw(12) << "t" << std::setw(12) << "eps" << std::setw(8) << "newton" << std::setw(9)
      << "linear" << std::setw(13) << "residual" << std::setw(13) << "min_u" << std::setw(12) << "sup_H"
      << std::setw(10) << "2C" << std::setw(8) << "active" << std::setw(11) << "violations" << std::setw(6)
      << "warm" << "seconds\n";
  for (const SolveStep& s : steps) {
    out << std::setw(12) << s.t << std::setw(12) << s.eps << std::setw(8) << s.newton_iterations << std::setw(9)
        << s.linear_iterations << std::setw(13) << s.residual_sup << std::setw(13) << s.min_u << std::setw(12)
        << s.sup_H << std::setw(10) << 2.0 * s.C << std::setw(8) << s.active_nodes << std::setw(11)
        << s.violations() << std::setw(6) << (s.warm_start ? "yes" : "no") << std::setprecision(3) << s.seconds
        << std::setprecision(6) << '\n';
  }
  if (!failure.empty()) out << "# aborted: " << failure << '\n';
  return out.str();
}

namespace {

enum class Bound : char { Free, Upper, Lower };

/// Complementarity residual: at a bound only the component pushing back
/// into the envelope counts.
double projected(double r, Bound b) {
  if (b == Bound::Upper) return std::min(r, 0.0);
  if (b == Bound::Lower) return std::max(r, 0.0);
  return r;
}

struct State {
  ResidualField R;
  std::vector<Bound> bound;
  double merit = 0.0;  // l2 of projected residual
  double sup = 0.0;    // sup of projected residual
};

State evaluate(const JangOperator& op, const BarrierPair& b, const GraphSolution& s) {
  State st;
  st.R = op.residual(s);
  const auto& interior = op.domain().interior;
  st.bound.assign(interior.size(), Bound::Free);
  double sum = 0.0;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const std::size_t n = interior[i];
    const double tol = 1e-13 * std::max(1.0, std::abs(s.u[n]));
    if (s.u[n] >= b.upper[n] - tol)
      st.bound[i] = Bound::Upper;
    else if (s.u[n] <= b.lower[n] + tol)
      st.bound[i] = Bound::Lower;
    const double r = projected(st.R.values[n], st.bound[i]);
    sum += r * r;
    st.sup = std::max(st.sup, std::abs(r));
  }
  st.merit = std::sqrt(sum);
  return st;
}

Eigen::VectorXd linear_solve(SparseMatrix& J, const Eigen::VectorXd& rhs, double tol, int& iterations) {
  Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>> bicg;
  bicg.setTolerance(tol);
  bicg.setMaxIterations(std::max<int>(2000, static_cast<int>(J.rows())));
  bicg.compute(J);
  Eigen::VectorXd x = bicg.solve(rhs);
  iterations += static_cast<int>(bicg.iterations());
  if (bicg.info() == Eigen::Success && x.allFinite()) return x;

  Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> ilu;
  ilu.setTolerance(tol);
  ilu.preconditioner().setDroptol(1e-4);
  ilu.preconditioner().setFillfactor(20);
  ilu.compute(J);
  x = ilu.solve(rhs);
  iterations += static_cast<int>(ilu.iterations());
  if (ilu.info() == Eigen::Success && x.allFinite()) return x;

  Eigen::SparseMatrix<double> Jc = J;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(Jc);
  if (lu.info() != Eigen::Success) fail(ErrorKind::Numeric, "linear solve breakdown: factorization failed");
  x = lu.solve(rhs);
  if (!x.allFinite()) fail(ErrorKind::Numeric, "linear solve breakdown: non-finite update");
  return x;
}

}  // namespace

FixedSolve solve_fixed(const JangOperator& op, const BarrierPair& b, const ContinuationSchedule& schedule,
                       const GraphSolution* warm_start) {
  const auto start = std::chrono::steady_clock::now();
  const DomainGrid& domain = op.domain();
  const auto& interior = domain.interior;
  FixedSolve out;
  GraphSolution& s = out.solution;
  s.t = b.t;
  s.eps = b.eps;
  s.u = warm_start ? warm_start->u : b.upper;
  s.u.resize(domain.grid.node_count(), 0.0);
  for (std::size_t n : interior) s.u[n] = std::clamp(s.u[n], b.lower[n], b.upper[n]);
  op.set_boundary(s, inner_boundary_datum(domain, b));
  op.fill_ghosts(s);
  out.step.warm_start = warm_start != nullptr;

  State st = evaluate(op, b, s);
  int it = 0;
  for (; it < schedule.max_newton && st.sup > schedule.newton_tol; ++it) {
    SparseMatrix J = op.linearize(s);
    Eigen::VectorXd rhs(interior.size());
    for (std::size_t i = 0; i < interior.size(); ++i) {
      const std::size_t n = interior[i];
      const double r = st.R.values[n];
      const bool active = (st.bound[i] == Bound::Upper && r > 0.0) || (st.bound[i] == Bound::Lower && r < 0.0);
      if (active) {
        for (SparseMatrix::InnerIterator e(J, static_cast<Eigen::Index>(i)); e; ++e)
          e.valueRef() = e.col() == static_cast<Eigen::Index>(i) ? 1.0 : 0.0;
        rhs[i] = 0.0;
      } else {
        rhs[i] = -r;
      }
    }
    const Eigen::VectorXd d = linear_solve(J, rhs, schedule.krylov_tol, out.step.linear_iterations);

    double alpha = 1.0;
    bool accepted = false;
    GraphSolution trial = s;
    while (alpha >= std::ldexp(1.0, -20)) {
      for (std::size_t i = 0; i < interior.size(); ++i) {
        const std::size_t n = interior[i];
        trial.u[n] = std::clamp(s.u[n] + alpha * d[i], b.lower[n], b.upper[n]);
      }
      op.fill_ghosts(trial);
      State next = evaluate(op, b, trial);
      if (next.merit < (1.0 - 1e-4 * alpha) * st.merit || next.sup <= schedule.newton_tol) {
        s.u.swap(trial.u);
        st = std::move(next);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "Newton stagnation at t = " << b.t << ", eps = " << b.eps << " after " << it
          << " iterations (projected residual " << st.sup << ")";
      fail(ErrorKind::Solver, msg.str());
    }
  }
  if (st.sup > schedule.newton_tol) {
    std::ostringstream msg;
    msg << "Newton did not converge at t = " << b.t << ", eps = " << b.eps << " in " << it
        << " iterations (projected residual " << st.sup << ")";
    fail(ErrorKind::Solver, msg.str());
  }
  out.step.newton_iterations = it;
  out.step.residual_sup = st.sup;
  for (Bound bd : st.bound) out.step.active_nodes += bd != Bound::Free;
  record_diagnostics(op, b, s, out.step);
  out.step.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void record_diagnostics(const JangOperator& op, const BarrierPair& b, const GraphSolution& s, SolveStep& step) {
  const DomainGrid& domain = op.domain();
  step.t = b.t;
  step.eps = b.eps;
  step.C = b.C;
  step.delta = b.delta;
  step.theta = b.theta;
  step.min_u = 0.0;
  step.sup_H = 0.0;
  step.envelope_violations = step.bound_violations = 0;
  step.inner_collar_violations = step.outer_collar_violations = step.curvature_violations = 0;
  const double slack = 1e-12;
  for (std::size_t n : domain.interior) {
    const double u = s.u[n];
    step.min_u = std::min(step.min_u, u);
    if (u > b.upper[n] + slack || u < b.lower[n] - slack) ++step.envelope_violations;
    if (u > slack || u < -b.C / b.t - slack) ++step.bound_violations;
    if (domain.dist_inner(n) <= b.theta && u > -b.theta / b.t + slack) ++step.inner_collar_violations;
    const double d1 = domain.dist_outer(n);
    if (d1 < b.theta && u < std::log1p(-d1 / b.theta) - slack) ++step.outer_collar_violations;
    const double H = std::abs(op.mean_curvature(s.u, n));
    step.sup_H = std::max(step.sup_H, H);
    if (H > 2.0 * b.C) ++step.curvature_violations;
  }
}

Continuation continue_in_t(const JangOperator& op, const ContinuationSchedule& schedule, const DeltaChoice& delta,
                           const StallTest& stalled) {
  schedule.validate();
  Continuation c;
  auto run = [&](double t, double eps) {
    try {
      BarrierPair b = build_barriers(op, t, eps, delta);
      FixedSolve fs = solve_fixed(op, b, schedule, c.solutions.empty() ? nullptr : &c.solutions.back());
      c.trace.steps.push_back(fs.step);
      c.solutions.push_back(std::move(fs.solution));
      c.barriers.push_back(std::move(b));
    } catch (const Error& e) {
      c.trace.failure = e.what();
      throw SolverError(e.kind(), e.what(), c.trace);
    }
  };
  const double eps0 = schedule.eps_values.front();
  for (double t : schedule.t_values) {
    run(t, eps0);
    const std::size_t k = c.solutions.size();
    if (schedule.stop_on_stall && stalled && k >= 2 && stalled(c.solutions[k - 2], c.solutions[k - 1])) break;
  }
  const double t_last = c.solutions.back().t;
  for (std::size_t i = 1; i < schedule.eps_values.size(); ++i) run(t_last, schedule.eps_values[i]);
  c.trace.complete = true;
  return c;
}

std::vector<char> blow_down_region(const JangOperator& op, const GraphSolution& s, double K) {
  const DomainGrid& domain = op.domain();
  std::vector<char> region(domain.grid.node_count(), 0);
  for (std::size_t n = 0; n < region.size(); ++n) {
    const NodeKind k = domain.kind[n];
    if ((k == NodeKind::Interior || k == NodeKind::InnerGhost) && s.u[n] < -K) region[n] = 1;
  }
  return region;
}

double default_blow_down_level(const BarrierPair& barriers, double factor) {
  return factor * barriers.theta / barriers.t;
}

}  // namespace gahf
