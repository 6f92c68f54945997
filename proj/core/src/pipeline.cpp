#include "gahf/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gahf/emit.hpp"
#include "gahf/error.hpp"

namespace gahf {

namespace {

std::string out_path(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.output_dir) / name).string();
}

std::string step_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fields/step_%02zu.csv", k);
  return buf;
}

/// Worst ratio sup_H / 2C over the trace.
void almost_minimizing(const SolveTrace& trace, VerificationReport& rep) {
  rep.almost_minimizing_checked = !trace.steps.empty();
  double worst = -1.0;
  for (const SolveStep& s : trace.steps) {
    const double ratio = s.sup_H / (2.0 * s.C);
    if (ratio > worst) {
      worst = ratio;
      rep.sup_H = s.sup_H;
      rep.C = s.C;
    }
  }
}

std::size_t trace_violations(const SolveTrace& trace) {
  std::size_t v = 0;
  for (const SolveStep& s : trace.steps) v += s.violations();
  return v;
}

std::string run_summary(const HorizonRun& run) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "delta = " << run.delta.delta << "\n";
  os << "theta = " << run.barriers.theta << "\n";
  os << "t_final = " << run.solution.t << "\n";
  os << "eps_final = " << run.solution.eps << "\n";
  os << "trace.steps = " << run.trace.steps.size() << "\n";
  const std::size_t v = trace_violations(run.trace);
  os << "trace.violations = " << v << " tolerance 0 " << (v == 0 ? "pass" : "fail") << "\n";
  os << "level.sign_change = " << (run.level.sign_change ? "yes" : "no") << "\n";
  os << "level.inner_boundary = " << (run.level.inner_boundary ? "yes" : "no") << "\n";
  os << "level.mean_defect = " << run.level.mean_defect << "\n";
  return os.str();
}

void write_surface(const RunConfig& c, const DomainGrid& base, const HorizonSurface& sigma) {
  write_text(out_path(c, "horizon.mesh"), mesh_text(sigma.mesh));
  write_text(out_path(c, "horizon_vertices.csv"), vertex_csv(sigma));
  const TrappedDomain td = trapped_domain_from_horizon(base, sigma);
  write_text(out_path(c, "trapped.mask"), mask_text(base.grid, trapped_region(base, td)));
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Solver:
    case ErrorKind::Numeric:
    case ErrorKind::Barrier:
    case ErrorKind::Iteration:
    case ErrorKind::Extraction:
    case ErrorKind::Oracle:
      return kExitSolver;
    default:
      return kExitInput;
  }
}

int guarded(const std::function<int()>& body, std::ostream& err, const std::string& output_dir) {
  ErrorKind kind = ErrorKind::Solver;
  std::string message;
  try {
    return body();
  } catch (const Error& e) {
    kind = e.kind();
    message = e.what();
  } catch (const std::bad_alloc&) {
    kind = ErrorKind::Numeric;
    message = "out of memory";
  } catch (const std::exception& e) {
    kind = ErrorKind::Solver;
    message = e.what();
  }
  const int code = exit_code(kind);
  const std::string block = error_block(kind, message, code);
  err << block;
  if (!output_dir.empty()) {
    try {
      write_text((std::filesystem::path(output_dir) / "error.txt").string(), block);
    } catch (const Error&) {
    }
  }
  return code;
}

int run_find(const RunConfig& config, std::ostream& out) {
  config.validate();
  const InitialDataSet ids = make_data(config);
  const DomainGrid base = make_domain(config, ids);
  FinderOptions opt = finder_options(config);
  opt.keep_history = config.write_fields;
  write_text(out_path(config, "config.ini"), config_text(config));

  HorizonRun run;
  try {
    run = find_horizon(ids, base, opt);
  } catch (const SolverError& e) {
    write_text(out_path(config, "trace.txt"), e.trace().table());
    throw;
  }
  write_text(out_path(config, "trace.txt"), run.trace.table());
  for (std::size_t k = 0; k < run.history.size(); ++k)
    write_text(out_path(config, step_name(k)), field_csv(run.domain, run.history[k]));
  write_surface(config, base, run.surface);

  VerificationReport rep = verify_horizon(run.surface, ids, run.domain, verification_options(config));
  almost_minimizing(run.trace, rep);
  const bool pass = rep.pass() && trace_violations(run.trace) == 0;
  std::string text = run_summary(run) + rep.text();
  text += std::string("exit = ") + (pass ? "0" : "2") + "\n";
  write_text(out_path(config, "report.txt"), text);
  out << text;
  return pass ? kExitPass : kExitVerification;
}

int run_outermost(const RunConfig& config, std::ostream& out) {
  config.validate();
  if (config.seeds.empty()) fail(ErrorKind::Usage, "outermost needs at least one seed");
  const InitialDataSet ids = make_data(config);
  const DomainGrid base = make_domain(config, ids);
  write_text(out_path(config, "config.ini"), config_text(config));

  std::vector<TrappedDomain> seeds;
  for (const SeedSpec& s : config.seeds) {
    if (s.kind == SeedSpec::Kind::Mask)
      seeds.push_back(trapped_domain_from_mask(base, ids, load_mask(s.path, base.grid), config.mode, s.label));
    else
      seeds.push_back(
          trapped_domain_from_shape(base, ids, Shape::sphere(s.ball.radius, s.ball.center), config.mode, s.label));
  }
  const OutermostResult res = outermost(ids, base, seeds, finder_options(config), config.max_rounds);
  write_text(out_path(config, "rounds.csv"), rounds_table(res, base.h()));
  write_text(out_path(config, "trace.txt"), res.final.run.trace.table());
  write_surface(config, base, res.final.run.surface);

  VerificationReport rep = verify_horizon(res.final.run.surface, ids, res.final.run.domain,
                                          verification_options(config));
  almost_minimizing(res.final.run.trace, rep);
  std::ostringstream os;
  os << std::setprecision(10);
  os << "rounds = " << res.rounds.size() << "\n";
  os << "converged = " << (res.converged ? "yes" : "no") << "\n";
  os << "final_hausdorff = " << res.rounds.back().hausdorff << " tolerance " << 0.5 * base.h() << "\n";
  os << "monotone_masks = " << (res.monotone_masks ? "yes" : "no") << "\n";
  os << "monotone_distances = " << (res.monotone_distances ? "yes" : "no") << "\n";
  os << "enclosure = " << (res.final.enclosure_ok ? "yes" : "no") << "\n";
  os << run_summary(res.final.run) << rep.text();
  const bool pass = rep.pass() && res.monotone_masks && trace_violations(res.final.run.trace) == 0;
  os << "exit = " << (pass ? 0 : 2) << "\n";
  write_text(out_path(config, "report.txt"), os.str());
  out << os.str();
  return pass ? kExitPass : kExitVerification;
}

int run_oracle(const RunConfig& config, std::ostream& out) {
  config.validate();
  const AnalyticFamily family = analytic_family(config);
  const double r_hi = config.outer_radius;
  const std::string table = oracle_table(family, config.dim, r_hi / 100.0, r_hi, 100);
  write_text(out_path(config, "oracle.csv"), table);
  const auto r = horizon_radius(family, config.dim, config.mode);
  std::ostringstream os;
  os << std::setprecision(12);
  os << "mode = " << to_string(config.mode) << "\n";
  if (r)
    os << "r* = " << *r << " tolerance 1e-10\n";
  else
    os << "no horizon\n";
  write_text(out_path(config, "oracle.txt"), os.str());
  out << os.str();
  return kExitPass;
}

int run_verify(const RunConfig& config, const std::string& mesh_path, std::ostream& out) {
  config.validate();
  const InitialDataSet ids = make_data(config);
  const DomainGrid base = make_domain(config, ids);
  const SurfaceMesh mesh = load_mesh(mesh_path);
  const HorizonSurface sigma = surface_from_mesh(mesh, base.grid, ids, config.mode);
  const VerificationReport rep = verify_horizon(sigma, ids, base, verification_options(config));
  std::string text = rep.text();
  text += std::string("exit = ") + (rep.pass() ? "0" : "2") + "\n";
  write_text(out_path(config, "verify_report.txt"), text);
  out << text;
  return rep.pass() ? kExitPass : kExitVerification;
}

}  // namespace gahf
