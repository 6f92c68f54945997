// Acceptance run: one PASS/FAIL line per criterion, details indented above it.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "gahf/config.hpp"
#include "gahf/emit.hpp"
#include "gahf/error.hpp"

using namespace gahf;

namespace {

std::ostringstream g_log;
int g_failures = 0;

void detail(const std::string& line) {
  std::cout << "  " << line << std::endl;
  g_log << "  " << line << "\n";
}

void verdict(int id, bool pass, const std::string& summary) {
  std::ostringstream os;
  os << "criterion " << std::setw(2) << id << ": " << (pass ? "PASS" : "FAIL") << "  " << summary;
  std::cout << os.str() << std::endl;
  g_log << os.str() << "\n";
  if (!pass) ++g_failures;
}

std::string num(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Largest |distance from the origin - r| over the mesh vertices.
double radial_deviation(const SurfaceMesh& m, double r, const Vec3& c = Vec3::Zero()) {
  double worst = 0.0;
  for (const Vec3& v : m.vertices) worst = std::max(worst, std::abs((v - c).norm() - r));
  return worst;
}

struct Case {
  RunConfig config;
  InitialDataSet ids;
  DomainGrid base;
  HorizonRun run;
  VerificationReport report;
  double seconds = 0.0;
};

Case run_case(const RunConfig& c, bool verify = true) {
  const auto t0 = std::chrono::steady_clock::now();
  InitialDataSet ids = make_data(c);
  DomainGrid base = make_domain(c, ids);
  HorizonRun run = find_horizon(ids, base, finder_options(c));
  VerificationReport rep;
  if (verify) rep = verify_horizon(run.surface, ids, run.domain, verification_options(c));
  const double s = seconds_since(t0);
  return Case{c, std::move(ids), std::move(base), std::move(run), std::move(rep), s};
}

RunConfig pg2d(double outer, int nodes, double inner = 1.0) {
  RunConfig c;
  c.family = "pg";
  c.dim = 2;
  c.outer_radius = outer;
  c.inner = {Ball{inner, Vec3::Zero()}};
  c.nodes = nodes;
  return c;
}

RunConfig two_source() {
  RunConfig c;
  c.family = "pg";
  c.dim = 2;
  c.sources = {PointMass{0.5, Vec3(-0.75, 0, 0)}, PointMass{0.5, Vec3(0.75, 0, 0)}};
  c.outer_radius = 8.0;
  c.inner = {Ball{0.4, Vec3(-0.75, 0, 0)}, Ball{0.4, Vec3(0.75, 0, 0)}};
  c.nodes = 200;
  return c;
}

void log_case(const std::string& name, const Case& k) {
  detail(name + ": h = " + num(k.base.h()) + ", steps = " + std::to_string(k.run.trace.steps.size()) +
         ", level K = " + num(k.run.level.K) + ", vertices = " + std::to_string(k.run.surface.mesh.vertices.size()) +
         ", time = " + num(k.seconds, 3) + " s");
}

/// Relative Jacobian error against a forward difference on a random field.
double jacobian_error(const JangOperator& op, std::mt19937& rng) {
  const DomainGrid& dom = op.domain();
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> U(0.05, 0.5);
  GraphSolution s;
  s.t = U(rng);
  s.eps = 0.01 + 0.1 * U(rng);
  s.u.assign(dom.grid.node_count(), 0.0);
  s.boundary.assign(s.u.size(), -U(rng) / s.t);
  const double amp = U(rng);
  for (std::size_t n : dom.interior) s.u[n] = amp * N(rng);
  op.fill_ghosts(s);
  const SparseMatrix J = op.linearize(s);
  const ResidualField r0 = op.residual(s);
  Eigen::VectorXd d(op.dof_count());
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = N(rng);
  d *= 1e-6 / d.norm();
  GraphSolution s1 = s;
  for (std::size_t n : dom.interior) s1.u[n] += d[op.dof(n)];
  op.fill_ghosts(s1);
  const ResidualField r1 = op.residual(s1);
  Eigen::VectorXd fd(op.dof_count());
  for (std::size_t n : dom.interior) fd[op.dof(n)] = r1.values[n] - r0.values[n];
  const Eigen::VectorXd jd = J * d;
  return (fd - jd).norm() / jd.norm();
}

template <class F>
void guarded_criterion(int id, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    detail(std::string("error.kind = ") + std::string(to_string(e.kind())) + ", error.message = " + e.what());
    verdict(id, false, "raised " + std::string(to_string(e.kind())) + " error");
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "acceptance_out";
  std::filesystem::create_directories(out);

  // Shared runs --------------------------------------------------------------
  // 2D painleve-gullstrand on 256^2 nodes with h = 0.025.
  std::optional<Case> pg_fine, pg_coarse, pg_mots, pg3;
  try {
    pg_fine = run_case(pg2d(3.1125, 256));
    log_case("pg 2d 256^2", *pg_fine);
    write_text((out / "pg2d_horizon.mesh").string(), mesh_text(pg_fine->run.surface.mesh));
    write_text((out / "pg2d_trace.txt").string(), pg_fine->run.trace.table());
    write_text((out / "pg2d_report.txt").string(), pg_fine->report.text());
  } catch (const Error& e) {
    detail(std::string("pg 2d run failed: ") + e.what());
  }
  try {
    RunConfig c = pg2d(3.1125, 256);
    c.mode = HorizonMode::Mots;
    pg_mots = run_case(c, false);
    log_case("pg 2d 256^2 mots", *pg_mots);
  } catch (const Error& e) {
    detail(std::string("pg 2d mots run failed: ") + e.what());
  }
  try {
    RunConfig c = pg2d(3.1125, 0);
    c.h = 0.05;
    pg_coarse = run_case(c, false);
    log_case("pg 2d h = 0.05", *pg_coarse);
  } catch (const Error& e) {
    detail(std::string("pg 2d coarse run failed: ") + e.what());
  }
  try {
    RunConfig c = pg2d(4.0, 64, 0.5);
    c.dim = 3;
    pg3 = run_case(c);
    log_case("pg 3d 64^3", *pg3);
    write_text((out / "pg3d_report.txt").string(), pg3->report.text());
  } catch (const Error& e) {
    detail(std::string("pg 3d run failed: ") + e.what());
  }

  // 1 -------------------------------------------------------------------------
  {
    bool pass = pg_fine && pg3;
    if (pg_fine) {
      const double dev = radial_deviation(pg_fine->run.surface.mesh, 2.0);
      detail("2d: max |r - 2| = " + num(dev) + " tolerance 0.05; runtime " + num(pg_fine->seconds, 3) +
             " s tolerance 120 s");
      pass = pass && dev <= 0.05 && pg_fine->seconds <= 120.0;
    }
    if (pg3) {
      const double tol = 2.0 * pg3->base.h();
      const double dev = radial_deviation(pg3->run.surface.mesh, 2.0);
      detail("3d: max |r - 2| = " + num(dev) + " tolerance " + num(tol) + "; runtime " + num(pg3->seconds, 3) +
             " s tolerance 900 s");
      pass = pass && dev <= tol && pg3->seconds <= 900.0;
    }
    verdict(1, pass, "painleve-gullstrand generalized horizon at r = 2");
  }

  // 2 -------------------------------------------------------------------------
  guarded_criterion(2, [&] {
    RunConfig c;
    c.family = "schwarzschild";
    c.dim = 3;
    c.outer_radius = 1.2;
    c.inner = {Ball{0.1, Vec3::Zero()}};
    c.nodes = 64;
    const Case k = run_case(c, false);
    log_case("isotropic schwarzschild 64^3", k);
    const double tol = 2.0 * k.base.h();
    const double dev = radial_deviation(k.run.surface.mesh, 0.5);
    const double exact = 16.0 * std::numbers::pi;
    const double rel = std::abs(k.run.surface.area - exact) / exact;
    detail("max |r - 0.5| = " + num(dev) + " tolerance " + num(tol));
    detail("area = " + num(k.run.surface.area) + " vs 16 pi = " + num(exact) + ", relative " + num(rel) +
           " tolerance 0.02");
    verdict(2, dev <= tol && rel <= 0.02, "minimal sphere of time-symmetric schwarzschild");
  });

  // 3 -------------------------------------------------------------------------
  {
    bool pass = pg_fine && pg3;
    for (const Case* k : {pg_fine ? &*pg_fine : nullptr, pg3 ? &*pg3 : nullptr}) {
      if (!k) continue;
      std::size_t bound = 0, inner = 0, outer = 0, envelope = 0;
      for (const SolveStep& s : k->run.trace.steps) {
        bound += s.bound_violations;
        inner += s.inner_collar_violations;
        outer += s.outer_collar_violations;
        envelope += s.envelope_violations;
      }
      detail(std::to_string(k->base.dim()) + "d: steps = " + std::to_string(k->run.trace.steps.size()) +
             ", 0 >= u >= -C/t violations = " + std::to_string(bound) + ", inner collar = " + std::to_string(inner) +
             ", outer collar = " + std::to_string(outer) + ", envelope = " + std::to_string(envelope) +
             " tolerance 0");
      pass = pass && bound + inner + outer + envelope == 0 && k->run.trace.complete;
    }
    verdict(3, pass, "barrier bounds at every accepted step");
  }

  // 4 -------------------------------------------------------------------------
  {
    bool pass = pg_fine && pg_coarse;
    if (pass) {
      const double rc = horizon_residual(pg_coarse->run.surface);
      const double rf = horizon_residual(pg_fine->run.surface);
      const double ratio = rf / rc;
      detail("h = " + num(pg_coarse->base.h()) + ": residual " + num(rc) + " tolerance 0.1");
      detail("h = " + num(pg_fine->base.h()) + ": residual " + num(rf));
      detail("ratio = " + num(ratio) + " tolerance [0.35, 0.65]");
      pass = rc <= 0.1 && ratio >= 0.35 && ratio <= 0.65;
    }
    verdict(4, pass, "horizon residual bound and first-order decay");
  }

  // 5 -------------------------------------------------------------------------
  {
    bool pass = pg_fine && pg3;
    for (const Case* k : {pg_fine ? &*pg_fine : nullptr, pg3 ? &*pg3 : nullptr}) {
      if (!k) continue;
      std::size_t bad = 0;
      double worst = 0.0;
      for (const SolveStep& s : k->run.trace.steps) {
        bad += s.curvature_violations + (s.sup_H > 2.0 * s.C ? 1 : 0);
        worst = std::max(worst, s.sup_H / (2.0 * s.C));
      }
      detail(std::to_string(k->base.dim()) + "d: max sup|H| / 2C = " + num(worst) + " tolerance 1; violations " +
             std::to_string(bad));
      pass = pass && bad == 0;
    }
    verdict(5, pass, "mean curvature of the graphs bounded by 2C");
  }

  // 6 -------------------------------------------------------------------------
  {
    bool pass = pg_fine && pg3;
    for (const Case* k : {pg_fine ? &*pg_fine : nullptr, pg3 ? &*pg3 : nullptr}) {
      if (!k) continue;
      const auto& o = k->report.outer;
      detail(std::to_string(k->base.dim()) + "d: trials = " + std::to_string(o.trials) + ", min excess = " +
             num(o.min_excess) + " tolerance " + num(-o.tolerance) + ", failures = " + std::to_string(o.failures));
      pass = pass && o.trials == 50 && o.pass();
    }
    verdict(6, pass, "outward perturbations never decrease area beyond 1e-3 area");
  }

  // 7 -------------------------------------------------------------------------
  {
    bool pass = pg_fine && pg3;
    for (const Case* k : {pg_fine ? &*pg_fine : nullptr, pg3 ? &*pg3 : nullptr}) {
      if (!k) continue;
      const auto& s = k->report.stability;
      detail(std::to_string(k->base.dim()) + "d: trials = " + std::to_string(s.trials) + ", margin = " +
             num(s.margin) + " tolerance " + num(-s.tolerance) + " (kappa^2 = " + num(s.kappa2) + ")");
      pass = pass && s.trials == 100 && s.pass();
    }
    verdict(7, pass, "stability inequality on the horizon");
  }

  // 8 and 9 share the two-centre setup ----------------------------------------
  std::optional<Case> two;
  std::vector<TrappedDomain> seeds;
  try {
    const RunConfig c = two_source();
    two = Case{c, make_data(c), {}, {}, {}, 0.0};
    two->base = make_domain(c, two->ids);
    detail("two-centre pg: h = " + num(two->base.h()) + ", seeds = disks 0.8 at (-0.75, 0) and (0.75, 0)");
    seeds.push_back(trapped_domain_from_shape(two->base, two->ids, Shape::sphere(0.8, Vec3(-0.75, 0, 0)), c.mode, "a"));
    seeds.push_back(trapped_domain_from_shape(two->base, two->ids, Shape::sphere(0.8, Vec3(0.75, 0, 0)), c.mode, "b"));
  } catch (const Error& e) {
    detail(std::string("two-centre setup failed: ") + e.what());
  }

  guarded_criterion(8, [&] {
    if (!two || seeds.size() != 2) {
      verdict(8, false, "setup failed");
      return;
    }
    const double h = two->base.h();
    const FinderOptions opt = finder_options(two->config);
    const auto t0 = std::chrono::steady_clock::now();
    const EnclosingResult r = enclosing_horizon(two->ids, two->base, seeds[0], seeds[1], opt);
    const TrappedDomain joined = trapped_domain_from_horizon(two->base, r.run.surface);
    const bool covers = mask_subset(trapped_region(two->base, seeds[0]), trapped_region(two->base, joined)) &&
                        mask_subset(trapped_region(two->base, seeds[1]), trapped_region(two->base, joined));
    detail("enclosing: components = " + std::to_string(r.run.surface.components) + ", mask subset of both = " +
           (r.enclosure_ok ? "yes" : "no") + ", encloses both seeds = " + (covers ? "yes" : "no") +
           ", time = " + num(seconds_since(t0), 3) + " s");
    write_text((out / "enclosing.mesh").string(), mesh_text(r.run.surface.mesh));

    const TrappedDomain A = trapped_domain_from_horizon(two->base, r.run.surface, "A");
    const EnclosingResult same = enclosing_horizon(two->ids, two->base, A, A, opt);
    const double d = hausdorff_distance(same.run.surface.mesh, r.run.surface.mesh);
    detail("idempotence: hausdorff(enclosing(A, A), A) = " + num(d) + " tolerance " + num(2 * h));
    verdict(8, r.run.surface.components == 1 && r.enclosure_ok && covers && d <= 2 * h,
            "enclosing horizon of two overlapping trapped disks");
  });

  guarded_criterion(9, [&] {
    if (!two || seeds.size() != 2) {
      verdict(9, false, "setup failed");
      return;
    }
    const double h = two->base.h();
    const FinderOptions opt = finder_options(two->config);
    const OutermostResult ab = outermost(two->ids, two->base, {seeds[0], seeds[1]}, opt, two->config.max_rounds);
    const OutermostResult ba = outermost(two->ids, two->base, {seeds[1], seeds[0]}, opt, two->config.max_rounds);
    bool pass = true;
    for (const OutermostResult* r : {&ab, &ba}) {
      std::ostringstream os;
      os << "rounds:";
      for (const auto& x : r->rounds) os << " [" << x.operation << " d = " << num(x.hausdorff) << " subset "
                                         << (x.subset ? "yes" : "no") << "]";
      detail(os.str());
      const double last = r->rounds.back().hausdorff;
      detail("decreasing masks = " + std::string(r->monotone_masks ? "yes" : "no") + ", monotone distances = " +
             (r->monotone_distances ? "yes" : "no") + ", final distance " + num(last) + " tolerance " + num(0.5 * h));
      pass = pass && r->converged && r->monotone_masks && r->monotone_distances && last < 0.5 * h;
    }
    write_text((out / "outermost_rounds.csv").string(), rounds_table(ab, h));
    const double d = hausdorff_distance(ab.final.run.surface.mesh, ba.final.run.surface.mesh);
    detail("seed order: hausdorff = " + num(d) + " tolerance " + num(2 * h));
    verdict(9, pass && d <= 2 * h, "outermost iteration");
  });

  // 10 ------------------------------------------------------------------------
  guarded_criterion(10, [&] {
    double worst_root = 0.0;
    auto defect = [](const AnalyticFamily& f, int dim, HorizonMode mode, double r) {
      const RadialScalars q = radial_scalars(f, dim, r);
      return mode == HorizonMode::Mots ? q.H + q.T : q.H - std::abs(q.T);
    };
    for (int dim : {2, 3})
      for (HorizonMode mode : {HorizonMode::Generalized, HorizonMode::Mots})
        for (double m : {0.5, 1.0, 2.0, 4.0}) {
          const auto f = AnalyticFamily::painleve_gullstrand(m);
          worst_root = std::max(worst_root, std::abs(defect(f, dim, mode, *horizon_radius(f, dim, mode))));
        }
    const auto sch = AnalyticFamily::isotropic_schwarzschild(1.0);
    worst_root = std::max(worst_root, std::abs(defect(sch, 3, HorizonMode::Generalized,
                                                      *horizon_radius(sch, 3, HorizonMode::Generalized))));
    detail("root defect max = " + num(worst_root) + " tolerance 1e-10");

    double worst_scale = 0.0;
    for (int dim : {2, 3}) {
      const double r1 = *horizon_radius(AnalyticFamily::painleve_gullstrand(1.0), dim, HorizonMode::Generalized);
      for (double lambda : {0.5, 2.0, 4.0}) {
        const double rl =
            *horizon_radius(AnalyticFamily::painleve_gullstrand(lambda), dim, HorizonMode::Generalized);
        worst_scale = std::max(worst_scale, std::abs(rl - lambda * r1));
      }
    }
    detail("scaling |r*(lm) - l r*(m)| max = " + num(worst_scale) + " tolerance 1e-10");

    std::mt19937 rng(2024);
    double worst_jac = 0.0;
    int trials = 0;
    for (int dim : {2, 3}) {
      Box b;
      b.lo = Vec3(-4, -4, dim == 3 ? -4 : 0);
      b.hi = -b.lo;
      const auto ids = InitialDataSet::from_family(AnalyticFamily::painleve_gullstrand(1.0), dim, b);
      const DomainGrid dom = build_domain(ids, Shape::sphere(3), Shape::sphere(1), dim == 2 ? 0.2 : 0.4);
      for (OperatorMode mode : {OperatorMode::Generalized, OperatorMode::Mots}) {
        const JangOperator op(ids, dom, mode, mots_cutoff(dom));
        const int count = dim == 2 ? 15 : 10;
        for (int k = 0; k < count; ++k, ++trials) worst_jac = std::max(worst_jac, jacobian_error(op, rng));
      }
    }
    detail("jacobian vs finite differences: " + std::to_string(trials) + " fields, max relative error " +
           num(worst_jac) + " tolerance 1e-4");
    verdict(10, worst_root <= 1e-10 && worst_scale <= 1e-10 && worst_jac <= 1e-4 && trials == 50,
            "oracle and jacobian self-checks");
  });

  // 11 ------------------------------------------------------------------------
  {
    bool pass = pg_mots && pg_fine;
    if (pass) {
      const double tol = 2.0 * pg_mots->base.h();
      const double dev = radial_deviation(pg_mots->run.surface.mesh, 2.0);
      const double d = hausdorff_distance(pg_mots->run.surface.mesh, pg_fine->run.surface.mesh);
      detail("mots: max |r - 2| = " + num(dev) + " tolerance " + num(tol));
      detail("hausdorff(mots, generalized) = " + num(d) + " tolerance " + num(tol));
      pass = dev <= tol && d <= tol;
    }
    verdict(11, pass, "mots mode matches the generalized horizon");
  }

  std::ofstream((out / "acceptance.txt").string()) << g_log.str();
  std::cout << (g_failures == 0 ? "all criteria passed" : std::to_string(g_failures) + " criteria failed")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
