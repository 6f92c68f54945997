#include "gahf/horizon_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gahf/error.hpp"

namespace gahf {

namespace {

std::vector<char> domain_mask(const DomainGrid& base, const Field& level) {
  std::vector<char> mask(base.grid.node_count(), 0);
  for (std::size_t n = 0; n < mask.size(); ++n) {
    const NodeKind k = base.kind[n];
    mask[n] = (k == NodeKind::Interior || k == NodeKind::OuterGhost) && level[n] >= 0.0;
  }
  return mask;
}

void require_same_grid(const DomainGrid& base, const CartesianGrid& g) {
  if (!base.grid.same_shape(g)) fail(ErrorKind::Geometry, "trapped domain lives on a different grid");
}

TrappedDomain from_surface(const DomainGrid& base, HorizonSurface sigma, std::string label) {
  require_same_grid(base, sigma.field.grid);
  TrappedDomain td;
  td.label = std::move(label);
  td.level.grid = base.grid;
  td.level.values = signed_distance(base.grid, sigma.mesh, sigma.field.values);
  td.level.defined.assign(base.grid.node_count(), 1);
  td.mask = domain_mask(base, td.level.values);
  td.surface = std::move(sigma);
  return td;
}

double eps_max(const ContinuationSchedule& s) { return s.eps_values.front(); }
double eps_min(const ContinuationSchedule& s) { return s.eps_values.back(); }

}  // namespace

TrappedDomain trapped_domain_from_shape(const DomainGrid& base, const InitialDataSet& ids, const Shape& region,
                                        HorizonMode mode, std::string label) {
  LevelField f;
  f.grid = base.grid;
  f.values.resize(base.grid.node_count());
  f.defined.resize(base.grid.node_count());
  for (std::size_t n = 0; n < f.values.size(); ++n) {
    f.values[n] = region.sdf(base.grid.position(n), base.dim());
    f.defined[n] = std::abs(f.values[n]) <= 6.0 * base.h() && base.phi_inner[n] >= -3.0 * base.h();
  }
  return from_surface(base, extract_surface(f, ids, mode), std::move(label));
}

TrappedDomain trapped_domain_from_mask(const DomainGrid& base, const InitialDataSet& ids,
                                       const std::vector<char>& region, HorizonMode mode, std::string label) {
  if (region.size() != base.grid.node_count()) fail(ErrorKind::Parse, "mask size does not match the grid");
  std::vector<char> usable(region.size());
  for (std::size_t n = 0; n < usable.size(); ++n) usable[n] = base.phi_inner[n] >= -3.0 * base.h();
  return from_surface(base, extract_region_surface(base.grid, region, ids, mode, usable), std::move(label));
}

TrappedDomain trapped_domain_from_horizon(const DomainGrid& base, const HorizonSurface& sigma, std::string label) {
  return from_surface(base, sigma, std::move(label));
}

std::vector<char> trapped_region(const DomainGrid& base, const TrappedDomain& a) {
  std::vector<char> r(base.grid.node_count(), 0);
  for (std::size_t n = 0; n < r.size(); ++n)
    r[n] = base.phi_outer[n] < 0.0 && (a.level.values[n] < 0.0 || base.phi_inner[n] <= 0.0);
  return r;
}

bool mask_subset(const std::vector<char>& a, const std::vector<char>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t n = 0; n < a.size(); ++n)
    if (a[n] && !b[n]) return false;
  return true;
}

FinderOptions mots_mode(FinderOptions options) {
  options.mode = HorizonMode::Mots;
  return options;
}

HorizonRun find_horizon(const InitialDataSet& ids, const DomainGrid& domain, const FinderOptions& options) {
  options.schedule.validate();
  HorizonRun run;
  run.domain = domain;
  const AdmissibilityReport outer = boundary_admissibility(domain, ids, eps_max(options.schedule), options.mode, false);
  const AdmissibilityReport inner = boundary_admissibility(domain, ids, eps_min(options.schedule), options.mode, false);
  run.admissibility = outer;
  run.admissibility.inner_margin = inner.inner_margin;
  run.admissibility.worst_inner = inner.worst_inner;
  run.admissibility.inner_pass = inner.inner_pass;
  auto where = [&](const Vec3& x) {
    std::ostringstream os;
    os << "(" << x[0] << ", " << x[1];
    if (domain.dim() == 3) os << ", " << x[2];
    os << ")";
    return os.str();
  };
  if (!run.admissibility.outer_pass) {
    std::ostringstream msg;
    msg << "outer boundary is not untrapped: margin " << run.admissibility.outer_margin << " at "
        << where(run.admissibility.worst_outer);
    fail(ErrorKind::Admissibility, msg.str());
  }
  if (!run.admissibility.inner_pass && !options.allow_marginal_inner) {
    std::ostringstream msg;
    msg << "inner boundary is not trapped: margin " << run.admissibility.inner_margin << " at "
        << where(run.admissibility.worst_inner);
    fail(ErrorKind::Admissibility, msg.str());
  }

  DeltaOptions dopt;
  dopt.mode = options.mode;
  dopt.allow_marginal = options.allow_marginal_inner;
  run.delta = choose_delta(run.domain, ids, eps_min(options.schedule), dopt);

  const Field cutoff = options.mode == HorizonMode::Mots ? mots_cutoff(run.domain) : Field{};
  const JangOperator op(ids, run.domain,
                        options.mode == HorizonMode::Mots ? OperatorMode::Mots : OperatorMode::Generalized, cutoff);
  Continuation c = continue_in_t(op, options.schedule, run.delta);
  run.trace = std::move(c.trace);
  run.solution = c.solutions.back();
  run.barriers = std::move(c.barriers.back());
  if (options.keep_history) run.history = std::move(c.solutions);

  double datum = std::numeric_limits<double>::infinity();
  for (const GhostLink& gl : run.domain.ghosts)
    if (run.domain.kind[gl.node] == NodeKind::InnerGhost) datum = std::min(datum, -run.solution.boundary[gl.node]);
  const double K_lo = 0.02 * run.barriers.theta / run.barriers.t;
  const double K_hi = std::max(0.999 * datum, 1.01 * K_lo);
  run.level = select_horizon_level(op, run.solution, K_lo, K_hi, options.mode, options.level_scan_points,
                                   options.level_bisections);
  if (run.level.inner_boundary) {
    LevelField f;
    f.grid = run.domain.grid;
    f.values = run.domain.phi_inner;
    f.defined.assign(f.values.size(), 1);
    run.surface = extract_surface(f, ids, options.mode);
    run.surface.level = run.level.K;
  } else {
    run.surface = extract_blow_down_surface(op, run.solution, run.level.K, options.mode);
  }
  return run;
}

DomainGrid intersect_domains(const InitialDataSet& ids, const DomainGrid& base, const TrappedDomain& a,
                             const TrappedDomain& b) {
  require_same_grid(base, a.level.grid);
  require_same_grid(base, b.level.grid);
  bool any = false;
  for (std::size_t n = 0; n < a.mask.size() && !any; ++n) any = a.mask[n] && b.mask[n] && base.is_interior(n);
  if (!any) fail(ErrorKind::Geometry, "trapped domains have an empty intersection");
  std::vector<Shape> parts;
  for (const TrappedDomain* t : {&a, &b}) {
    Field sdf(base.grid.node_count());
    for (std::size_t n = 0; n < sdf.size(); ++n) sdf[n] = std::min(t->level.values[n], base.phi_inner[n]);
    parts.push_back(Shape::sampled_field(base.grid, std::move(sdf)));
  }
  return build_domain(ids, base.outer_shape, parts, base.grid);
}

EnclosingResult enclosing_horizon(const InitialDataSet& ids, const DomainGrid& base, const TrappedDomain& a,
                                  const TrappedDomain& b, const FinderOptions& options) {
  const DomainGrid domain = intersect_domains(ids, base, a, b);
  FinderOptions opt = options;
  opt.allow_marginal_inner = true;
  EnclosingResult r;
  r.run = find_horizon(ids, domain, opt);
  r.domain = trapped_domain_from_horizon(base, r.run.surface, a.label + "&" + b.label);
  std::vector<char> both(a.mask.size());
  for (std::size_t n = 0; n < both.size(); ++n) both[n] = a.mask[n] && b.mask[n];
  r.enclosure_ok = mask_subset(r.domain.mask, both);
  r.clearance_a = a.surface ? min_distance(r.run.surface.mesh, a.surface->mesh) : 0.0;
  r.clearance_b = b.surface ? min_distance(r.run.surface.mesh, b.surface->mesh) : 0.0;
  return r;
}

OutermostResult outermost(const InitialDataSet& ids, const DomainGrid& base, const std::vector<TrappedDomain>& seeds,
                          const FinderOptions& options, int max_rounds) {
  if (seeds.empty()) fail(ErrorKind::Usage, "outermost needs at least one seed");
  OutermostResult out;
  const double h = base.h();
  TrappedDomain current = seeds.front();
  const HorizonSurface* previous = current.surface ? &*current.surface : nullptr;

  auto record = [&](EnclosingResult r, std::string op, const std::vector<char>& previous_mask) {
    OutermostRound round;
    round.operation = std::move(op);
    round.hausdorff = previous ? hausdorff_distance(r.run.surface.mesh, previous->mesh)
                               : std::numeric_limits<double>::infinity();
    round.subset = mask_subset(r.domain.mask, previous_mask);
    round.area = r.run.surface.area;
    round.level = r.run.level.K;
    out.monotone_masks = out.monotone_masks && round.subset;
    if (out.rounds.size() >= 2 && round.hausdorff > out.rounds.back().hausdorff) out.monotone_distances = false;
    out.rounds.push_back(round);
    out.final = std::move(r);
    current = out.final.domain;
    previous = &*out.final.domain.surface;
  };

  std::vector<std::size_t> order;
  for (std::size_t k = 1; k < seeds.size(); ++k) order.push_back(k);
  for (std::size_t k : order) {
    const std::vector<char> prev_mask = current.mask;
    record(enclosing_horizon(ids, base, current, seeds[k], options), current.label + "+" + seeds[k].label,
           prev_mask);
  }
  for (int round = 0; round < max_rounds; ++round) {
    const std::vector<char> prev_mask = current.mask;
    record(enclosing_horizon(ids, base, current, current, options), "refine", prev_mask);
    if (out.rounds.back().hausdorff < 0.5 * h) {
      out.converged = true;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "outermost iteration did not converge in " << max_rounds << " rounds; distances:";
  for (const auto& r : out.rounds) msg << " " << r.hausdorff;
  fail(ErrorKind::Iteration, msg.str());
}

}  // namespace gahf
