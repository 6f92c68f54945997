#include "gahf/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gahf/error.hpp"
#include "gahf/level_set.hpp"

namespace gahf {

namespace {

double regularized(double x, double eps) { return std::sqrt(x * x + eps * eps); }

/// True when x is on the boundary of Omega rather than hidden inside another part.
bool visible(const DomainGrid& domain, std::size_t part, const Vec3& x) {
  const int dim = domain.dim();
  if (domain.outer_shape.sdf(x, dim) >= 0.0) return false;
  for (std::size_t j = 0; j < domain.inner_shapes.size(); ++j)
    if (j != part && domain.inner_shapes[j].sdf(x, dim) < 0.0) return false;
  return true;
}

std::string point_text(const Vec3& x, int dim) {
  std::ostringstream out;
  out << '(';
  for (int a = 0; a < dim; ++a) out << (a ? ", " : "") << x[a];
  out << ')';
  return out.str();
}

template <class F>
void for_block(const CartesianGrid& g, std::size_t n, F&& f) {
  const auto c = g.coords(n);
  const int kz = g.dim == 3 ? 1 : 0;
  for (int dk = -kz; dk <= kz; ++dk)
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) f(g.index(c[0] + di, c[1] + dj, c[2] + dk));
}

}  // namespace

AdmissibilityReport boundary_admissibility(const DomainGrid& domain, const InitialDataSet& ids, double eps,
                                           HorizonMode mode, bool throw_on_fail) {
  if (mode == HorizonMode::Generalized && !(eps > 0.0)) fail(ErrorKind::Parameter, "eps must be positive");
  const int dim = domain.dim();
  const double step = 0.5 * domain.h();
  AdmissibilityReport rep;
  rep.outer_margin = std::numeric_limits<double>::infinity();
  rep.inner_margin = std::numeric_limits<double>::infinity();

  const ScalarFunction outer = [&](const Vec3& x) { return domain.outer_shape.sdf(x, dim); };
  for (const Vec3& x : level_set_samples(domain.grid, outer, 0.0)) {
    const LevelSetPoint lp = level_set_geometry(ids, outer, x, step);
    const double m = mode == HorizonMode::Generalized ? lp.H - regularized(lp.trace_p, eps) : lp.H + lp.trace_p;
    if (m < rep.outer_margin) {
      rep.outer_margin = m;
      rep.worst_outer = x;
    }
  }
  for (std::size_t k = 0; k < domain.inner_shapes.size(); ++k) {
    const Shape& part = domain.inner_shapes[k];
    const ScalarFunction f = [&](const Vec3& x) { return part.sdf(x, dim); };
    for (const Vec3& x : level_set_samples(domain.grid, f, 0.0)) {
      if (!visible(domain, k, x)) continue;
      const LevelSetPoint lp = level_set_geometry(ids, f, x, step);
      const double m = mode == HorizonMode::Generalized ? regularized(lp.trace_p, eps) - lp.H
                                                        : -(lp.H + lp.trace_p - eps * (dim - 1));
      if (m < rep.inner_margin) {
        rep.inner_margin = m;
        rep.worst_inner = x;
      }
    }
  }
  rep.outer_pass = rep.outer_margin > 0.0;
  rep.inner_pass = rep.inner_margin > 0.0;
  if (throw_on_fail && !rep.outer_pass) {
    std::ostringstream msg;
    msg << "outer boundary is not untrapped: margin " << rep.outer_margin << " at " << point_text(rep.worst_outer, dim);
    fail(ErrorKind::Admissibility, msg.str());
  }
  if (throw_on_fail && !rep.inner_pass) {
    std::ostringstream msg;
    msg << "inner boundary is not trapped: margin " << rep.inner_margin << " at " << point_text(rep.worst_inner, dim);
    fail(ErrorKind::Admissibility, msg.str());
  }
  return rep;
}

double distance_surface_margin(const DomainGrid& domain, const InitialDataSet& ids, std::size_t part,
                               double gamma, double delta, double eps, HorizonMode mode) {
  const int dim = domain.dim();
  const Shape& shape = domain.inner_shapes.at(part);
  const ScalarFunction f = [&](const Vec3& x) { return shape.sdf(x, dim); };
  double worst = std::numeric_limits<double>::infinity();
  for (const Vec3& x : level_set_samples(domain.grid, f, gamma)) {
    if (!visible(domain, part, x)) continue;
    const LevelSetPoint lp = level_set_geometry(ids, f, x, 0.5 * domain.h());
    const double m = mode == HorizonMode::Generalized ? regularized(lp.trace_p, eps) - lp.H
                                                      : -(lp.H + lp.trace_p - eps * (dim - 1));
    worst = std::min(worst, m - 2.0 * delta);
  }
  return worst;
}

namespace {

bool collar_smooth(const DomainGrid& domain, std::size_t part, double width) {
  const double h = domain.h();
  const Field& d = domain.inner_parts[part];
  for (std::size_t n : domain.interior) {
    if (!(d[n] > 0.0 && d[n] < width)) continue;
    const double g = node_gradient(domain.grid, d, n).norm();
    if (g < 1.0 - 10.0 * h || g > 1.0 + 10.0 * h) return false;
  }
  return true;
}

bool delta_passes(const DomainGrid& domain, const InitialDataSet& ids, std::size_t part, double delta, double eps,
                  const DeltaOptions& opt) {
  if (!(2.0 * delta < domain.boundary_separation())) return false;
  if (!collar_smooth(domain, part, 2.0 * delta)) return false;
  for (int j = 0; j < opt.gamma_samples; ++j) {
    const double gamma = 2.0 * delta * j / opt.gamma_samples;
    if (!(distance_surface_margin(domain, ids, part, gamma, delta, eps, opt.mode) > 0.0)) return false;
  }
  return true;
}

}  // namespace

DeltaChoice choose_delta(const DomainGrid& domain, const InitialDataSet& ids, double eps, const DeltaOptions& opt) {
  const double h = domain.h();
  const double start = domain.boundary_separation() / 4.0;
  DeltaChoice out;
  for (std::size_t k = 0; k < domain.inner_shapes.size(); ++k) {
    double pass = 0.0, failed = 0.0;
    for (double delta = start; delta >= 2.0 * h; delta *= 0.5) {
      if (delta_passes(domain, ids, k, delta, eps, opt)) {
        pass = delta;
        break;
      }
      failed = delta;
    }
    if (pass == 0.0 && failed > 2.0 * h && delta_passes(domain, ids, k, 2.0 * h, eps, opt)) pass = 2.0 * h;
    if (pass > 0.0 && failed > 0.0) {
      double lo = pass, hi = failed;
      for (int i = 0; i < opt.refine_steps; ++i) {
        const double mid = 0.5 * (lo + hi);
        (delta_passes(domain, ids, k, mid, eps, opt) ? lo : hi) = mid;
      }
      pass = lo;
    }
    char marginal = 0;
    if (pass == 0.0) {
      if (!opt.allow_marginal) {
        std::ostringstream msg;
        msg << "no admissible delta >= 2h = " << 2.0 * h << " for inner part " << k
            << " (margin at gamma = 0: " << distance_surface_margin(domain, ids, k, 0.0, 0.0, eps, opt.mode) << ")";
        fail(ErrorKind::Barrier, msg.str());
      }
      pass = 2.0 * h;
      marginal = 1;
    }
    out.part_delta.push_back(pass);
    out.marginal.push_back(marginal);
  }
  out.delta = *std::min_element(out.part_delta.begin(), out.part_delta.end());
  return out;
}

double barrier_constant(const DomainGrid& domain, double eps, HorizonMode mode) {
  const double p = domain.norms.p_c0 + (mode == HorizonMode::Mots ? eps : 0.0);
  return 1.0 + domain.dim() * p;
}

BarrierPair build_barriers(const JangOperator& op, double t, double eps, const DeltaChoice& delta,
                           bool throw_on_fail) {
  if (!(t > 0.0)) fail(ErrorKind::Parameter, "barriers need t > 0");
  if (!(eps > 0.0)) fail(ErrorKind::Parameter, "barriers need eps > 0");
  const DomainGrid& domain = op.domain();
  const CartesianGrid& g = domain.grid;
  const std::size_t count = g.node_count();
  const std::size_t parts = domain.inner_parts.size();
  if (delta.part_delta.size() != parts) fail(ErrorKind::Parameter, "barriers: one delta per inner part expected");

  BarrierPair b;
  b.delta = delta.delta;
  b.part_delta = delta.part_delta;
  b.theta = 0.5 * delta.delta;
  b.t = t;
  b.eps = eps;
  b.C = barrier_constant(domain, eps, op.mode() == OperatorMode::Mots ? HorizonMode::Mots : HorizonMode::Generalized);
  b.upper.assign(count, 0.0);
  b.lower.assign(count, 0.0);

  // Branch labels for the kink test: super = part index * 2 + collar flag, sub = log flag.
  std::vector<int> upper_branch(count, -1), lower_branch(count, 0);
  const double floor = -b.C / t;
  const double reach = delta.delta * (1.0 - std::exp(-b.C / t));
  for (std::size_t n = 0; n < count; ++n) {
    if (domain.kind[n] == NodeKind::Exterior) continue;
    double best = 0.0;
    int branch = -1;
    for (std::size_t k = 0; k < parts; ++k) {
      const double d = domain.inner_parts[k][n];
      const double dk = delta.part_delta[k];
      if (d <= dk && (d - dk) / t < best) {
        best = (d - dk) / t;
        branch = static_cast<int>(k);
      }
    }
    b.upper[n] = best;
    upper_branch[n] = branch;
    const double d1 = domain.dist_outer(n);
    if (d1 <= reach) {
      b.lower[n] = std::max(std::log1p(-d1 / delta.delta), floor);
      lower_branch[n] = 1;
    } else {
      b.lower[n] = floor;
    }
  }

  for (std::size_t n : domain.interior) {
    if (b.lower[n] > b.upper[n]) {
      std::ostringstream msg;
      msg << "sub solution exceeds super solution at " << point_text(g.position(n), g.dim);
      fail(ErrorKind::Barrier, msg.str());
    }
  }

  GraphSolution su{b.upper, {}, t, eps};
  GraphSolution sl{b.lower, {}, t, eps};
  BarrierCheck& c = b.check;
  c.tolerance = 10.0 * domain.h();
  c.super_residual_max = -std::numeric_limits<double>::infinity();
  c.sub_residual_min = std::numeric_limits<double>::infinity();
  for (std::size_t n : domain.interior) {
    bool upper_smooth = true, lower_smooth = true;
    for_block(g, n, [&](std::size_t m) {
      upper_smooth = upper_smooth && upper_branch[m] == upper_branch[n];
      lower_smooth = lower_smooth && lower_branch[m] == lower_branch[n];
    });
    if (upper_smooth) {
      c.super_residual_max = std::max(c.super_residual_max, op.residual_at(su, n));
      ++c.super_nodes;
    }
    if (lower_smooth) {
      c.sub_residual_min = std::min(c.sub_residual_min, op.residual_at(sl, n));
      ++c.sub_nodes;
    }
  }
  if (c.super_nodes == 0) c.super_residual_max = 0.0;
  if (c.sub_nodes == 0) c.sub_residual_min = 0.0;
  if (throw_on_fail && !c.pass()) {
    std::ostringstream msg;
    msg << "barrier residual check failed at t = " << t << ": super max " << c.super_residual_max << ", sub min "
        << c.sub_residual_min << " (tolerance " << c.tolerance << ")";
    fail(ErrorKind::Barrier, msg.str());
  }
  return b;
}

double max_admissible_t(const JangOperator& op, double t_lo, double t_hi, double eps, const DeltaChoice& delta) {
  auto ok = [&](double t) { return build_barriers(op, t, eps, delta, false).check.pass(); };
  if (ok(t_hi)) return t_hi;
  if (!ok(t_lo)) {
    std::ostringstream msg;
    msg << "barriers are not admissible even at t = " << t_lo;
    fail(ErrorKind::Barrier, msg.str());
  }
  double lo = t_lo, hi = t_hi;
  for (int i = 0; i < 20; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

Field inner_boundary_datum(const DomainGrid& domain, const BarrierPair& barriers) {
  Field out(domain.grid.node_count(), 0.0);
  for (const GhostLink& gl : domain.ghosts) {
    if (domain.kind[gl.node] != NodeKind::InnerGhost) continue;
    double best = 0.0;
    for (std::size_t k = 0; k < domain.inner_parts.size(); ++k) {
      const double d = std::max(domain.inner_parts[k][gl.node], 0.0);
      const double dk = barriers.part_delta[k];
      if (d <= dk) best = std::min(best, (d - dk) / barriers.t);
    }
    out[gl.node] = best;
  }
  return out;
}

Field mots_cutoff(const DomainGrid& domain, double lo_fraction, double hi_fraction) {
  const double sep = domain.boundary_separation();
  Field phi(domain.grid.node_count(), 0.0);
  for (std::size_t n = 0; n < phi.size(); ++n)
    phi[n] = smoothstep(lo_fraction * sep, hi_fraction * sep, domain.dist_outer(n));
  return phi;
}

}  // namespace gahf
