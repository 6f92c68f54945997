#include "gahf/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gahf/error.hpp"

namespace gahf {

namespace {

namespace pt = boost::property_tree;

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v)) fail(ErrorKind::Usage, key + ": '" + text + "' is not a number");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != std::floor(v)) fail(ErrorKind::Usage, key + ": '" + text + "' is not an integer");
  return static_cast<int>(v);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(";"));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

Vec3 parse_point(const std::string& text) {
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  if (parts.size() < 2 || parts.size() > 3) fail(ErrorKind::Usage, "point '" + text + "' needs 2 or 3 coordinates");
  Vec3 x = Vec3::Zero();
  for (std::size_t a = 0; a < parts.size(); ++a) x[a] = to_double("point", boost::trim_copy(parts[a]));
  return x;
}

std::string point_text(const Vec3& x, int dim) {
  std::ostringstream os;
  os << std::setprecision(12) << x[0] << "," << x[1];
  if (dim == 3) os << "," << x[2];
  return os.str();
}

}  // namespace

Ball parse_ball(const std::string& text) {
  const auto at = text.find('@');
  Ball b;
  b.radius = to_double("radius", boost::trim_copy(text.substr(0, at)));
  if (at != std::string::npos) b.center = parse_point(text.substr(at + 1));
  return b;
}

PointMass parse_point_mass(const std::string& text) {
  const auto at = text.find('@');
  PointMass m;
  m.mass = to_double("mass", boost::trim_copy(text.substr(0, at)));
  if (at != std::string::npos) m.center = parse_point(text.substr(at + 1));
  return m;
}

void RunConfig::validate() const {
  static const std::set<std::string> families{"flat", "schwarzschild", "pg", "brill-lindquist", "file"};
  if (!families.count(family)) fail(ErrorKind::Usage, "data.family: unknown family '" + family + "'");
  if (family == "file" && data_file.empty()) fail(ErrorKind::Usage, "data.file is required for family 'file'");
  if (dim != 2 && dim != 3) fail(ErrorKind::Usage, "data.dim must be 2 or 3");
  if (!(mass > 0.0)) fail(ErrorKind::Usage, "data.mass must be positive");
  for (const auto& s : sources)
    if (!(s.mass > 0.0)) fail(ErrorKind::Usage, "data.sources: masses must be positive");
  if (!(outer_radius > 0.0)) fail(ErrorKind::Usage, "domain.outer must be positive");
  if (inner.empty()) fail(ErrorKind::Usage, "domain.inner needs at least one ball");
  for (const auto& b : inner)
    if (!(b.radius > 0.0)) fail(ErrorKind::Usage, "domain.inner radii must be positive");
  if (h < 0.0 || (h == 0.0 && nodes != 0 && nodes < 16)) fail(ErrorKind::Usage, "domain.h or domain.nodes out of range");
  if (!(t0 > 0.0) || !(t_min > 0.0) || !(t_min <= t0)) fail(ErrorKind::Usage, "schedule: need 0 < t_min <= t0");
  if (!(eps0 > 0.0) || !(eps_min > 0.0) || !(eps_min <= eps0)) fail(ErrorKind::Usage, "schedule: need 0 < eps_min <= eps0");
  if (!(newton_tol > 0.0) || !(krylov_tol > 0.0) || max_newton <= 0) fail(ErrorKind::Usage, "schedule: tolerances must be positive");
  if (!(residual_scale > 0.0) || !(tau_area > 0.0)) fail(ErrorKind::Usage, "verify: tolerances must be positive");
  if (probes <= 0 || stability_trials <= 0) fail(ErrorKind::Usage, "verify: probe counts must be positive");
  if (max_rounds <= 0) fail(ErrorKind::Usage, "run.max_rounds must be positive");
}

double RunConfig::spacing() const {
  if (h > 0.0) return h;
  const int n = nodes > 0 ? nodes : (dim == 2 ? 256 : 64);
  return 2.0 * outer_radius / (n - 7);
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Parse, origin + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) fail(ErrorKind::Usage, origin + ": key '" + section + "' outside a section");
    for (const auto& [key, node] : body) {
      const std::string v = boost::trim_copy(node.data());
      const std::string k = section + "." + key;
      if (k == "data.family") c.family = v;
      else if (k == "data.dim") c.dim = to_int(k, v);
      else if (k == "data.mass") c.mass = to_double(k, v);
      else if (k == "data.sources") {
        c.sources.clear();
        for (const auto& s : split_list(v)) c.sources.push_back(parse_point_mass(s));
      } else if (k == "data.mass2") c.mass2 = to_double(k, v);
      else if (k == "data.separation") c.separation = to_double(k, v);
      else if (k == "data.file") c.data_file = v;
      else if (k == "domain.outer") c.outer_radius = to_double(k, v);
      else if (k == "domain.inner") {
        c.inner.clear();
        for (const auto& s : split_list(v)) c.inner.push_back(parse_ball(s));
      } else if (k == "domain.h") c.h = to_double(k, v);
      else if (k == "domain.nodes") c.nodes = to_int(k, v);
      else if (k == "schedule.t0") c.t0 = to_double(k, v);
      else if (k == "schedule.t_min") c.t_min = to_double(k, v);
      else if (k == "schedule.eps0") c.eps0 = to_double(k, v);
      else if (k == "schedule.eps_min") c.eps_min = to_double(k, v);
      else if (k == "schedule.newton_tol") c.newton_tol = to_double(k, v);
      else if (k == "schedule.max_newton") c.max_newton = to_int(k, v);
      else if (k == "schedule.krylov_tol") c.krylov_tol = to_double(k, v);
      else if (k == "verify.residual_scale") c.residual_scale = to_double(k, v);
      else if (k == "verify.tau_area") c.tau_area = to_double(k, v);
      else if (k == "verify.probes") c.probes = to_int(k, v);
      else if (k == "verify.stability_trials") c.stability_trials = to_int(k, v);
      else if (k == "verify.seed") c.seed = static_cast<std::uint64_t>(to_int(k, v));
      else if (k == "verify.stability_seed") c.stability_seed = static_cast<std::uint64_t>(to_int(k, v));
      else if (k == "run.mode") c.mode = parse_horizon_mode(v);
      else if (k == "run.output") c.output_dir = v;
      else if (k == "run.fields") c.write_fields = v == "1" || v == "true" || v == "yes";
      else if (k == "run.max_rounds") c.max_rounds = to_int(k, v);
      else if (k == "seeds.list") {
        c.seeds.clear();
        int count = 0;
        for (const auto& s : split_list(v)) {
          SeedSpec seed;
          std::istringstream is(s);
          std::string kind, arg;
          is >> kind >> arg;
          if (kind == "ball" || kind == "disk") {
            seed.kind = SeedSpec::Kind::Ball;
            seed.ball = parse_ball(arg);
          } else if (kind == "mask") {
            seed.kind = SeedSpec::Kind::Mask;
            seed.path = arg;
          } else {
            fail(ErrorKind::Usage, k + ": seed '" + s + "' must start with ball, disk or mask");
          }
          seed.label = "seed" + std::to_string(count++);
          c.seeds.push_back(seed);
        }
      } else {
        fail(ErrorKind::Usage, origin + ": unknown key '" + k + "'");
      }
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parse, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string config_text(const RunConfig& c) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "[data]\nfamily = " << c.family << "\ndim = " << c.dim << "\nmass = " << c.mass << "\n";
  if (!c.sources.empty()) {
    os << "sources =";
    for (std::size_t i = 0; i < c.sources.size(); ++i)
      os << (i ? "; " : " ") << c.sources[i].mass << "@" << point_text(c.sources[i].center, c.dim);
    os << "\n";
  }
  if (c.family == "brill-lindquist") os << "mass2 = " << c.mass2 << "\nseparation = " << c.separation << "\n";
  if (!c.data_file.empty()) os << "file = " << c.data_file << "\n";
  os << "\n[domain]\nouter = " << c.outer_radius << "\ninner =";
  for (std::size_t i = 0; i < c.inner.size(); ++i)
    os << (i ? "; " : " ") << c.inner[i].radius << "@" << point_text(c.inner[i].center, c.dim);
  os << "\nh = " << c.spacing() << "\n";
  os << "\n[schedule]\nt0 = " << c.t0 << "\nt_min = " << c.t_min << "\neps0 = " << c.eps0 << "\neps_min = " << c.eps_min
     << "\nnewton_tol = " << c.newton_tol << "\nmax_newton = " << c.max_newton << "\nkrylov_tol = " << c.krylov_tol
     << "\n";
  os << "\n[verify]\nresidual_scale = " << c.residual_scale << "\ntau_area = " << c.tau_area << "\nprobes = " << c.probes
     << "\nstability_trials = " << c.stability_trials << "\nseed = " << c.seed
     << "\nstability_seed = " << c.stability_seed << "\n";
  os << "\n[run]\nmode = " << to_string(c.mode) << "\noutput = " << c.output_dir
     << "\nfields = " << (c.write_fields ? "yes" : "no") << "\nmax_rounds = " << c.max_rounds << "\n";
  if (!c.seeds.empty()) {
    os << "\n[seeds]\nlist =";
    for (std::size_t i = 0; i < c.seeds.size(); ++i) {
      const auto& s = c.seeds[i];
      os << (i ? "; " : " ");
      if (s.kind == SeedSpec::Kind::Mask)
        os << "mask " << s.path;
      else
        os << "ball " << s.ball.radius << "@" << point_text(s.ball.center, c.dim);
    }
    os << "\n";
  }
  return os.str();
}

AnalyticFamily analytic_family(const RunConfig& c) {
  AnalyticFamily f;
  if (c.family == "flat") f = AnalyticFamily::flat();
  else if (c.family == "schwarzschild") f = AnalyticFamily::isotropic_schwarzschild(c.mass);
  else if (c.family == "pg") f = c.sources.empty() ? AnalyticFamily::painleve_gullstrand(c.mass)
                                                   : AnalyticFamily::painleve_gullstrand(c.sources);
  else if (c.family == "brill-lindquist") f = AnalyticFamily::brill_lindquist(c.mass, c.mass2, c.separation);
  else fail(ErrorKind::Usage, "family '" + c.family + "' has no closed form");
  f.validate();
  return f;
}

InitialDataSet make_data(const RunConfig& c) {
  c.validate();
  if (c.family == "file") return load_grid_file(c.data_file);
  const CartesianGrid g = grid_for(Shape::sphere(c.outer_radius), c.dim, c.spacing());
  Box box;
  box.lo = g.origin - Vec3::Constant(g.h);
  box.hi = g.origin;
  for (int a = 0; a < 3; ++a) box.hi[a] += g.h * (g.size[a] - 1) + g.h;
  if (c.dim == 2) {
    box.lo[2] = -1.0;
    box.hi[2] = 1.0;
  }
  return InitialDataSet::from_family(analytic_family(c), c.dim, box);
}

DomainGrid make_domain(const RunConfig& c, const InitialDataSet& ids) {
  c.validate();
  if (ids.dimension() != c.dim) fail(ErrorKind::Usage, "data.dim does not match the data set");
  const Shape outer = Shape::sphere(c.outer_radius);
  std::vector<Shape> parts;
  for (const Ball& b : c.inner) parts.push_back(Shape::sphere(b.radius, b.center));
  const CartesianGrid grid = grid_for(outer, c.dim, c.spacing());
  return build_domain(ids, outer, parts, grid);
}

FinderOptions finder_options(const RunConfig& c) {
  FinderOptions o;
  o.schedule = ContinuationSchedule::halving(c.t0, c.t_min, c.eps0, c.eps_min);
  o.schedule.newton_tol = c.newton_tol;
  o.schedule.max_newton = c.max_newton;
  o.schedule.krylov_tol = c.krylov_tol;
  o.mode = c.mode;
  return o;
}

VerificationOptions verification_options(const RunConfig& c) {
  VerificationOptions o;
  o.probes.trials = c.probes;
  o.probes.seed = c.seed;
  o.probes.tolerance_fraction = c.tau_area;
  o.stability_trials = c.stability_trials;
  o.stability_seed = c.stability_seed;
  o.residual_scale = c.residual_scale;
  return o;
}

}  // namespace gahf
