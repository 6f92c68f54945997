#include "gahf/horizon_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <sstream>

#include "gahf/error.hpp"

namespace gahf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool has_neighbours(const CartesianGrid& g, const std::vector<char>& ok, std::size_t n) {
  const auto c = g.coords(n);
  for (int a = 0; a < g.dim; ++a) {
    if (c[a] == 0 || c[a] == g.size[a] - 1) return false;
    if (!ok[n + g.stride(a)] || !ok[n - g.stride(a)]) return false;
  }
  return true;
}

/// Multilinear weights of the cell containing x; false when a corner with
/// non-negligible weight is not valid.
bool cell_interpolate(const CartesianGrid& g, const Field& f, const std::vector<char>& valid, const Vec3& x,
                      double& out) {
  const Vec3 s = g.to_index_space(x);
  int base[3] = {0, 0, 0};
  double frac[3] = {0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) {
    base[a] = std::clamp(static_cast<int>(std::floor(s[a])), 0, g.size[a] - 2);
    frac[a] = std::clamp(s[a] - base[a], 0.0, 1.0);
  }
  const int corners = 1 << g.dim;
  double sum = 0.0;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    int idx[3] = {base[0], base[1], base[2]};
    for (int a = 0; a < g.dim; ++a) {
      const int bit = (c >> a) & 1;
      idx[a] += bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (w < 1e-12) continue;
    const std::size_t n = g.index(idx[0], idx[1], idx[2]);
    if (!valid[n]) return false;
    sum += w * f[n];
  }
  out = sum;
  return true;
}

double element_measure(const SurfaceMesh& mesh, std::size_t e, const InitialDataSet& ids) {
  const auto& el = mesh.elements[e];
  const Mat3 g = ids.evaluate(mesh.centroid(e)).g;
  const Vec3 a = mesh.vertices[el[1]] - mesh.vertices[el[0]];
  if (mesh.dim == 2) return std::sqrt(a.dot(g * a));
  const Vec3 b = mesh.vertices[el[2]] - mesh.vertices[el[0]];
  const double gaa = a.dot(g * a), gbb = b.dot(g * b), gab = a.dot(g * b);
  return 0.5 * std::sqrt(std::max(gaa * gbb - gab * gab, 0.0));
}

/// Euclidean unit normals per vertex (element normals summed).
std::vector<Vec3> vertex_normals(const SurfaceMesh& mesh) {
  std::vector<Vec3> nv(mesh.vertices.size(), Vec3::Zero());
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const Vec3 n = mesh.element_normal(e);
    for (std::size_t k = 0; k < mesh.element_size(); ++k) nv[mesh.elements[e][k]] += n;
  }
  for (Vec3& n : nv) {
    const double l = n.norm();
    if (l > 0.0) n /= l;
  }
  return nv;
}

/// Euclidean measure attached to each vertex (share of adjacent elements).
std::vector<double> vertex_weights(const SurfaceMesh& mesh) {
  std::vector<double> w(mesh.vertices.size(), 0.0);
  const double share = 1.0 / static_cast<double>(mesh.element_size());
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const double m = mesh.element_normal(e).norm();
    for (std::size_t k = 0; k < mesh.element_size(); ++k) w[mesh.elements[e][k]] += share * m;
  }
  return w;
}

double mean_defect(const SurfaceMesh& mesh, const CartesianGrid& grid, const Field& F,
                   const std::vector<char>& valid, bool& sampled) {
  const auto w = vertex_weights(mesh);
  double num = 0.0, den = 0.0;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    double value;
    if (!cell_interpolate(grid, F, valid, mesh.vertices[v], value)) continue;
    num += w[v] * value;
    den += w[v];
  }
  sampled = den > 0.0;
  return sampled ? num / den : 0.0;
}

void check_mesh(const SurfaceMesh& mesh) {
  if (const auto open = boundary_defects(mesh)) fail(ErrorKind::Extraction, "surface is not closed (" + std::to_string(open) + " open edges)");
  if (const auto hits = self_intersections(mesh))
    fail(ErrorKind::Extraction, "surface self-intersects (" + std::to_string(hits) + " element pairs); refine the grid");
}

LevelField shifted(const LevelField& f, double c) {
  LevelField out = f;
  for (double& v : out.values) v -= c;
  return out;
}

}  // namespace

std::size_t HorizonSurface::valid_vertices() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1));
}

Field signed_distance(const CartesianGrid& grid, const SurfaceMesh& mesh, const Field& sign_field) {
  const MeshDistance dist(mesh);
  Field out(grid.node_count());
  for (std::size_t n = 0; n < out.size(); ++n) {
    const double d = dist(grid.position(n));
    out[n] = sign_field[n] < 0.0 ? -d : d;
  }
  return out;
}

double horizon_defect(double H, double T, HorizonMode mode) {
  return mode == HorizonMode::Mots ? H + T : H - std::abs(T);
}

NodalGeometry nodal_level_geometry(const InitialDataSet& ids, const LevelField& f) {
  const CartesianGrid& g = f.grid;
  const std::size_t N = g.node_count();
  const int dim = g.dim;
  const double h = g.h;
  NodalGeometry out;
  out.H.assign(N, kNaN);
  out.T.assign(N, kNaN);
  out.h2.assign(N, kNaN);
  out.grad_psi.assign(N, kNaN);
  out.valid.assign(N, 0);

  std::vector<Mat3> ginv(N, Mat3::Identity());
  std::vector<double> sqrtg(N, 1.0);
  for (std::size_t n = 0; n < N; ++n) {
    if (!f.defined[n]) continue;
    const DataSample s = ids.evaluate(g.position(n));
    ginv[n] = s.g.inverse();
    sqrtg[n] = std::sqrt(s.g.topLeftCorner(dim, dim).determinant());
  }

  auto gradient = [&](const Field& v, std::size_t n) {
    Vec3 d = Vec3::Zero();
    for (int a = 0; a < dim; ++a) d[a] = (v[n + g.stride(a)] - v[n - g.stride(a)]) / (2.0 * h);
    return d;
  };

  Field psi(N, 0.0);
  std::vector<char> psi_ok(N, 0);
  for (std::size_t n = 0; n < N; ++n) {
    if (!f.defined[n] || !has_neighbours(g, f.defined, n)) continue;
    const Vec3 d = gradient(f.values, n);
    const double norm = std::sqrt(d.dot(ginv[n] * d));
    if (!(norm > 1e-300)) continue;
    psi[n] = f.values[n] / norm;
    psi_ok[n] = 1;
  }

  std::vector<Vec3> nu(N, Vec3::Zero()), normal(N, Vec3::Zero());
  std::vector<char> nu_ok(N, 0);
  for (std::size_t n = 0; n < N; ++n) {
    if (!psi_ok[n]) continue;
    const Vec3 d = gradient(f.values, n);
    nu[n] = d / std::sqrt(d.dot(ginv[n] * d));
    normal[n] = ginv[n] * nu[n];
    nu_ok[n] = 1;
    if (has_neighbours(g, psi_ok, n)) {
      const Vec3 dp = gradient(psi, n);
      out.grad_psi[n] = std::sqrt(dp.dot(ginv[n] * dp));
    }
  }

  for (std::size_t n = 0; n < N; ++n) {
    if (!nu_ok[n] || !has_neighbours(g, nu_ok, n) || std::isnan(out.grad_psi[n])) continue;
    const DataSample s = ids.evaluate(g.position(n));
    double div = 0.0;
    Mat3 dnu = Mat3::Zero();  // dnu(i, j) = d_i nu_j
    for (int a = 0; a < dim; ++a) {
      const std::size_t up = n + g.stride(a), dn = n - g.stride(a);
      div += (sqrtg[up] * normal[up][a] - sqrtg[dn] * normal[dn][a]) / (2.0 * h);
      dnu.row(a) = ((nu[up] - nu[dn]) / (2.0 * h)).transpose();
    }
    out.H[n] = div / sqrtg[n];
    out.T[n] = (ginv[n] * s.p).trace() - normal[n].dot(s.p * normal[n]);
    const Christoffel gamma = christoffel(s, dim);
    Mat3 hess = dnu;
    for (int k = 0; k < dim; ++k) hess -= gamma[k] * nu[n][k];
    hess = 0.5 * (hess + hess.transpose()).eval();
    const Mat3 proj = Mat3::Identity() - nu[n] * normal[n].transpose();
    const Mat3 hh = proj * hess * proj.transpose();
    const Mat3 m = ginv[n] * hh;
    out.h2[n] = (m * m).trace();
    out.valid[n] = 1;
  }
  return out;
}

LevelField graph_level_field(const JangOperator& op, const GraphSolution& s, double K) {
  const DomainGrid& d = op.domain();
  LevelField f;
  f.grid = d.grid;
  f.values.assign(d.grid.node_count(), 0.0);
  f.defined.assign(d.grid.node_count(), 0);
  double lowest = 0.0;
  for (std::size_t n = 0; n < f.values.size(); ++n) {
    if (d.kind[n] == NodeKind::Exterior) continue;
    f.defined[n] = 1;
    f.values[n] = s.u[n] + K;
    lowest = std::min(lowest, f.values[n]);
  }
  const double hole = std::min(lowest, 0.0) - d.h();
  for (std::size_t n = 0; n < f.values.size(); ++n) {
    if (f.defined[n]) continue;
    f.values[n] = d.phi_outer[n] >= 0.0 ? std::max(K, d.h()) : hole;
  }
  return f;
}

double area(const SurfaceMesh& mesh, const InitialDataSet& ids) {
  double a = 0.0;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) a += element_measure(mesh, e, ids);
  return a;
}

void surface_geometry(HorizonSurface& sigma, const InitialDataSet& ids) {
  const NodalGeometry geo = nodal_level_geometry(ids, sigma.field);
  const CartesianGrid& g = sigma.field.grid;
  const std::size_t V = sigma.mesh.vertices.size();
  sigma.H.assign(V, kNaN);
  sigma.T.assign(V, kNaN);
  sigma.h2.assign(V, kNaN);
  sigma.valid.assign(V, 0);
  for (std::size_t v = 0; v < V; ++v) {
    const Vec3& x = sigma.mesh.vertices[v];
    double H, T, h2, gp;
    if (!cell_interpolate(g, geo.H, geo.valid, x, H) || !cell_interpolate(g, geo.T, geo.valid, x, T) ||
        !cell_interpolate(g, geo.h2, geo.valid, x, h2) || !cell_interpolate(g, geo.grad_psi, geo.valid, x, gp))
      continue;
    if (gp < 0.5) {
      std::ostringstream os;
      os << "degenerate level-set normal (|grad psi| = " << gp << ") near (" << x[0] << ", " << x[1] << ", " << x[2]
         << ")";
      fail(ErrorKind::Geometry, os.str());
    }
    sigma.H[v] = H;
    sigma.T[v] = T;
    sigma.h2[v] = h2;
    sigma.valid[v] = 1;
  }
}

HorizonSurface extract_surface(const LevelField& field, const InitialDataSet& ids, HorizonMode mode) {
  HorizonSurface sigma;
  sigma.mode = mode;
  sigma.field = field;
  sigma.mesh = extract_isosurface(field.grid, field.values);
  if (sigma.mesh.empty()) fail(ErrorKind::Extraction, "empty surface");
  check_mesh(sigma.mesh);
  sigma.components = label_components(sigma.mesh, sigma.component);
  sigma.area = area(sigma.mesh, ids);
  surface_geometry(sigma, ids);
  return sigma;
}

HorizonSurface extract_region_surface(const CartesianGrid& grid, const std::vector<char>& region,
                                      const InitialDataSet& ids, HorizonMode mode, const std::vector<char>& usable) {
  if (std::find(region.begin(), region.end(), 1) == region.end()) fail(ErrorKind::Extraction, "empty region");
  Field smooth(grid.node_count(), 0.0);
  for (std::size_t n = 0; n < smooth.size(); ++n) {
    const auto c = grid.coords(n);
    double sum = 0.0;
    int count = 0;
    for (int dk = (grid.dim == 3 ? -1 : 0); dk <= (grid.dim == 3 ? 1 : 0); ++dk)
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int i = c[0] + di, j = c[1] + dj, k = c[2] + dk;
          if (i < 0 || j < 0 || k < 0 || i >= grid.size[0] || j >= grid.size[1] || k >= grid.size[2]) continue;
          sum += region[grid.index(i, j, k)] ? 1.0 : 0.0;
          ++count;
        }
    smooth[n] = 0.5 - sum / count;
  }
  const SurfaceMesh raw = extract_isosurface(grid, smooth);
  if (raw.empty()) fail(ErrorKind::Extraction, "region has no interface");
  LevelField field;
  field.grid = grid;
  field.values = signed_distance(grid, raw, smooth);
  field.defined.resize(grid.node_count());
  for (std::size_t n = 0; n < field.values.size(); ++n)
    field.defined[n] = std::abs(field.values[n]) <= 6.0 * grid.h && (usable.empty() || usable[n]);
  return extract_surface(field, ids, mode);
}

HorizonSurface surface_from_mesh(const SurfaceMesh& mesh, const CartesianGrid& grid, const InitialDataSet& ids,
                                 HorizonMode mode) {
  if (mesh.dim != grid.dim) fail(ErrorKind::Geometry, "mesh and grid dimensions differ");
  if (mesh.empty()) fail(ErrorKind::Extraction, "empty surface");
  check_mesh(mesh);
  const std::vector<char> inside = enclosed_nodes(grid, mesh);
  Field sign(grid.node_count());
  for (std::size_t n = 0; n < sign.size(); ++n) sign[n] = inside[n] ? -1.0 : 1.0;
  HorizonSurface sigma;
  sigma.mode = mode;
  sigma.mesh = mesh;
  sigma.field.grid = grid;
  sigma.field.values = signed_distance(grid, mesh, sign);
  sigma.field.defined.resize(grid.node_count());
  for (std::size_t n = 0; n < sign.size(); ++n) sigma.field.defined[n] = std::abs(sigma.field.values[n]) <= 6.0 * grid.h;
  sigma.components = label_components(sigma.mesh, sigma.component);
  sigma.area = area(sigma.mesh, ids);
  surface_geometry(sigma, ids);
  return sigma;
}

double horizon_residual(const HorizonSurface& sigma) {
  double r = 0.0;
  for (std::size_t v = 0; v < sigma.valid.size(); ++v)
    if (sigma.valid[v]) r = std::max(r, std::abs(horizon_defect(sigma.H[v], sigma.T[v], sigma.mode)));
  return r;
}

LevelSelection select_horizon_level(const JangOperator& op, const GraphSolution& s, double K_lo, double K_hi,
                                    HorizonMode mode, int scan_points, int bisections) {
  if (!(K_lo > 0.0) || !(K_hi > K_lo) || scan_points < 2) fail(ErrorKind::Parameter, "invalid level scan range");
  const LevelField base = graph_level_field(op, s, 0.0);
  const NodalGeometry geo = nodal_level_geometry(op.data(), base);
  Field F(geo.H.size(), 0.0);
  for (std::size_t n = 0; n < F.size(); ++n)
    if (geo.valid[n]) F[n] = horizon_defect(geo.H[n], geo.T[n], mode);

  auto evaluate = [&](double K) {
    LevelScanPoint p;
    p.K = K;
    const SurfaceMesh mesh = extract_isosurface(base.grid, shifted(base, -K).values);
    if (mesh.empty()) return p;
    p.mean_defect = mean_defect(mesh, base.grid, F, geo.valid, p.sampled);
    return p;
  };

  LevelSelection sel;
  const double ratio = std::pow(K_hi / K_lo, 1.0 / (scan_points - 1));
  for (int j = 0; j < scan_points; ++j) sel.scan.push_back(evaluate(K_lo * std::pow(ratio, j)));

  for (std::size_t j = 0; j + 1 < sel.scan.size(); ++j) {
    const auto& a = sel.scan[j];
    const auto& b = sel.scan[j + 1];
    if (!a.sampled || !b.sampled || !(a.mean_defect > 0.0) || !(b.mean_defect <= 0.0)) continue;
    double lo = a.K, hi = b.K;
    LevelScanPoint best = std::abs(a.mean_defect) < std::abs(b.mean_defect) ? a : b;
    for (int it = 0; it < bisections; ++it) {
      const double mid = std::sqrt(lo * hi);
      const LevelScanPoint p = evaluate(mid);
      if (!p.sampled) break;
      if (std::abs(p.mean_defect) < std::abs(best.mean_defect)) best = p;
      (p.mean_defect > 0.0 ? lo : hi) = mid;
    }
    sel.K = best.K;
    sel.mean_defect = best.mean_defect;
    sel.sign_change = true;
    return sel;
  }

  bool any = false, all_positive = true, all_negative = true;
  const LevelScanPoint* best = nullptr;
  for (const auto& p : sel.scan) {
    if (!p.sampled) continue;
    any = true;
    all_positive = all_positive && p.mean_defect > 0.0;
    all_negative = all_negative && p.mean_defect < 0.0;
    if (!best || std::abs(p.mean_defect) < std::abs(best->mean_defect)) best = &p;
  }
  if (!any || all_positive) {
    // Every level set is untrapped: the interface sits on the inner boundary.
    sel.K = K_hi;
    sel.inner_boundary = true;
    sel.mean_defect = any ? best->mean_defect : 0.0;
    return sel;
  }
  if (all_negative) {
    sel.K = K_lo;
    sel.mean_defect = sel.scan.front().mean_defect;
    return sel;
  }
  sel.K = best->K;
  sel.mean_defect = best->mean_defect;
  return sel;
}

HorizonSurface extract_blow_down_surface(const JangOperator& op, const GraphSolution& s, double K, HorizonMode mode) {
  HorizonSurface sigma = extract_surface(graph_level_field(op, s, K), op.data(), mode);
  sigma.level = K;
  return sigma;
}

bool separates_boundaries(const DomainGrid& domain, const LevelField& field) {
  const CartesianGrid& g = domain.grid;
  std::vector<char> seen(g.node_count(), 0);
  std::deque<std::size_t> queue;
  for (const GhostLink& gl : domain.ghosts)
    if (domain.kind[gl.node] == NodeKind::OuterGhost && field.values[gl.node] >= 0.0) {
      seen[gl.node] = 1;
      queue.push_back(gl.node);
    }
  while (!queue.empty()) {
    const std::size_t n = queue.front();
    queue.pop_front();
    if (domain.kind[n] == NodeKind::InnerGhost) return false;
    const auto c = g.coords(n);
    for (int a = 0; a < g.dim; ++a)
      for (int side = -1; side <= 1; side += 2) {
        const int ci = c[a] + side;
        if (ci < 0 || ci >= g.size[a]) continue;
        const std::size_t m = n + side * g.stride(a);
        if (seen[m] || domain.kind[m] == NodeKind::Exterior || field.values[m] < 0.0) continue;
        seen[m] = 1;
        queue.push_back(m);
      }
  }
  return true;
}

OuterMinimizingReport outer_minimizing_probe(const HorizonSurface& sigma, const InitialDataSet& ids,
                                             const ProbeOptions& options) {
  OuterMinimizingReport rep;
  const SurfaceMesh& mesh = sigma.mesh;
  const double h = sigma.field.grid.h;
  rep.area = sigma.area;
  rep.tolerance = options.tolerance_fraction * sigma.area;
  rep.trials = options.trials;
  rep.min_excess = std::numeric_limits<double>::infinity();
  rep.global_min_excess = std::numeric_limits<double>::infinity();
  if (mesh.empty()) return rep;

  const double amp_max = options.max_amplitude > 0.0 ? options.max_amplitude : 5.0 * h;
  const auto normals = vertex_normals(mesh);
  Vec3 lo = mesh.vertices[0], hi = lo;
  for (const Vec3& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double extent = (hi - lo).norm();

  for (int trial = 0; trial < options.trials; ++trial) {
    const std::uint64_t seed = options.seed * 1000003ULL + static_cast<std::uint64_t>(trial);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, mesh.vertices.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Vec3 centre = mesh.vertices[pick(rng)];
    const double width = 2.0 * h + unit(rng) * std::max(0.25 * extent - 2.0 * h, 0.0);
    const double amplitude = amp_max * (1.0 - unit(rng));  // (0, amp_max]
    SurfaceMesh bumped = mesh;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
      const double r2 = (mesh.vertices[v] - centre).squaredNorm();
      bumped.vertices[v] += amplitude * std::exp(-0.5 * r2 / (width * width)) * normals[v];
    }
    const double excess = area(bumped, ids) - sigma.area;
    rep.min_excess = std::min(rep.min_excess, excess);
    if (excess < -rep.tolerance) {
      ++rep.failures;
      rep.failing_seeds.push_back(seed);
    }
  }

  if (sigma.level > 0.0 && options.global_levels > 0) {
    for (int j = 1; j <= options.global_levels; ++j) {
      const double c = sigma.level * j / (options.global_levels + 1.0);
      const SurfaceMesh sweep = extract_isosurface(sigma.field.grid, shifted(sigma.field, c).values);
      if (sweep.empty()) continue;
      const double excess = area(sweep, ids) - sigma.area;
      rep.global_min_excess = std::min(rep.global_min_excess, excess);
      if (excess < -rep.tolerance) {
        ++rep.failures;
        rep.failing_seeds.push_back(static_cast<std::uint64_t>(j));
      }
    }
  }
  if (!std::isfinite(rep.global_min_excess)) rep.global_min_excess = 0.0;
  if (!std::isfinite(rep.min_excess)) rep.min_excess = 0.0;
  return rep;
}

StabilityReport stability_probe(const HorizonSurface& sigma, const InitialDataSet& ids, double kappa2, int trials,
                                std::uint64_t seed) {
  StabilityReport rep;
  const SurfaceMesh& mesh = sigma.mesh;
  rep.kappa2 = kappa2;
  rep.area = sigma.area;
  rep.tolerance = 0.05 * kappa2 * sigma.area;
  rep.trials = trials;
  rep.margin = std::numeric_limits<double>::infinity();
  if (mesh.empty() || trials <= 0) {
    rep.margin = 0.0;
    return rep;
  }
  const int dim = mesh.dim;
  const double c_h = 1.0 - 1.0 / (3.0 * (dim - 1));
  const std::size_t es = mesh.element_size();

  // Per-element metric data: measure and inverse edge Gram matrix.
  std::vector<double> measure(mesh.elements.size());
  std::vector<Eigen::Matrix2d> gram_inv(mesh.elements.size());
  std::vector<double> h2(mesh.vertices.size(), 0.0);
  for (std::size_t v = 0; v < h2.size(); ++v)
    if (sigma.valid.size() == h2.size() && sigma.valid[v]) h2[v] = sigma.h2[v];
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& el = mesh.elements[e];
    const Mat3 g = ids.evaluate(mesh.centroid(e)).g;
    const Vec3 a = mesh.vertices[el[1]] - mesh.vertices[el[0]];
    if (dim == 2) {
      measure[e] = std::sqrt(a.dot(g * a));
      continue;
    }
    const Vec3 b = mesh.vertices[el[2]] - mesh.vertices[el[0]];
    Eigen::Matrix2d G;
    G << a.dot(g * a), a.dot(g * b), a.dot(g * b), b.dot(g * b);
    measure[e] = 0.5 * std::sqrt(std::max(G.determinant(), 0.0));
    gram_inv[e] = G.determinant() > 0.0 ? Eigen::Matrix2d(G.inverse()) : Eigen::Matrix2d::Zero();
  }

  auto quadratic_form = [&](const std::vector<double>& phi) {
    double grad = 0.0, mass = 0.0, curv = 0.0;
    for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
      const auto& el = mesh.elements[e];
      const double m = measure[e];
      if (!(m > 0.0)) continue;
      if (dim == 2) {
        const double a = phi[el[0]], b = phi[el[1]];
        grad += (b - a) * (b - a) / m;
        mass += m * (a * a + a * b + b * b) / 3.0;
      } else {
        const double a = phi[el[0]], b = phi[el[1]], c = phi[el[2]];
        const Eigen::Vector2d d(b - a, c - a);
        grad += m * d.dot(gram_inv[e] * d);
        mass += m * (a * a + b * b + c * c + a * b + b * c + a * c) / 6.0;
      }
      double sum = 0.0;
      for (std::size_t k = 0; k < es; ++k) sum += h2[el[k]] * phi[el[k]] * phi[el[k]];
      curv += m * sum / static_cast<double>(es);
    }
    return grad + kappa2 * mass - c_h * curv;
  };

  std::vector<double> phi(mesh.vertices.size(), 1.0);
  rep.constant_margin = quadratic_form(phi);
  rep.margin = rep.constant_margin;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, mesh.vertices.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec3 lo = mesh.vertices[0], hi = lo;
  for (const Vec3& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double extent = (hi - lo).norm();
  const double h = sigma.field.grid.h;
  for (int trial = 1; trial < trials; ++trial) {
    const int bumps = 1 + static_cast<int>(unit(rng) * 4.0);
    std::vector<Vec3> centres;
    std::vector<double> widths, weights;
    for (int b = 0; b < bumps; ++b) {
      centres.push_back(mesh.vertices[pick(rng)]);
      widths.push_back(2.0 * h + unit(rng) * 0.5 * extent);
      weights.push_back(2.0 * unit(rng) - 1.0);
    }
    double peak = 0.0;
    for (std::size_t v = 0; v < phi.size(); ++v) {
      double s = 0.0;
      for (int b = 0; b < bumps; ++b)
        s += weights[b] * std::exp(-0.5 * (mesh.vertices[v] - centres[b]).squaredNorm() / (widths[b] * widths[b]));
      phi[v] = s;
      peak = std::max(peak, std::abs(s));
    }
    if (!(peak > 0.0)) continue;
    for (double& p : phi) p /= peak;
    rep.margin = std::min(rep.margin, quadratic_form(phi));
  }
  return rep;
}

std::string to_string(Coincidence c) {
  switch (c) {
    case Coincidence::Disjoint: return "disjoint";
    case Coincidence::Coincident: return "coincident";
    case Coincidence::Anomaly: return "anomaly";
  }
  return "unknown";
}

std::vector<SurfaceMesh> inner_boundary_meshes(const DomainGrid& domain) {
  std::vector<SurfaceMesh> out;
  for (const Field& part : domain.inner_parts) {
    const SurfaceMesh mesh = extract_isosurface(domain.grid, part);
    if (mesh.empty()) continue;
    std::vector<int> labels;
    const int count = label_components(mesh, labels);
    for (int c = 0; c < count; ++c) out.push_back(component_mesh(mesh, labels, c));
  }
  return out;
}

std::vector<ComponentContact> coincidence_check(const HorizonSurface& sigma, const std::vector<SurfaceMesh>& inner,
                                                double h) {
  std::vector<ComponentContact> out;
  for (int c = 0; c < sigma.components; ++c) {
    const SurfaceMesh comp = component_mesh(sigma.mesh, sigma.component, c);
    ComponentContact cc;
    cc.component = c;
    cc.hausdorff = std::numeric_limits<double>::infinity();
    cc.clearance = std::numeric_limits<double>::infinity();
    int close = 0, match = -1;
    for (std::size_t b = 0; b < inner.size(); ++b) {
      const double hd = hausdorff_distance(comp, inner[b]);
      const double md = min_distance(comp, inner[b]);
      cc.hausdorff = std::min(cc.hausdorff, hd);
      cc.clearance = std::min(cc.clearance, md);
      if (hd <= 2.0 * h) {
        ++close;
        match = static_cast<int>(b);
      }
    }
    if (close == 1) {
      cc.flag = Coincidence::Coincident;
      cc.boundary_component = match;
    } else if (close == 0 && cc.clearance > 2.0 * h) {
      cc.flag = Coincidence::Disjoint;
    } else {
      cc.flag = Coincidence::Anomaly;
    }
    out.push_back(cc);
  }
  return out;
}

bool VerificationReport::pass() const {
  for (const auto& c : contacts)
    if (c.flag == Coincidence::Anomaly) return false;
  return residual_pass() && outer.pass() && stability.pass() && separates && almost_minimizing_pass() &&
         valid_vertices > 0;
}

std::string VerificationReport::text() const {
  std::ostringstream os;
  os.precision(10);
  os << "h = " << h << "\n";
  os << "mode = " << to_string(mode) << "\n";
  os << "level = " << level << "\n";
  os << "vertices = " << vertices << "\n";
  os << "valid_vertices = " << valid_vertices << "\n";
  os << "components = " << components << "\n";
  os << "separates_boundaries = " << (separates ? "yes" : "no") << "\n";
  os << "horizon_residual = " << residual << " tolerance " << residual_tolerance << " "
     << (residual_pass() ? "pass" : "fail") << "\n";
  os << "area = " << area << "\n";
  os << "outer_minimizing.trials = " << outer.trials << "\n";
  os << "outer_minimizing.min_excess = " << outer.min_excess << " tolerance " << -outer.tolerance << "\n";
  os << "outer_minimizing.global_min_excess = " << outer.global_min_excess << " tolerance " << -outer.tolerance << "\n";
  os << "outer_minimizing.failures = " << outer.failures << " " << (outer.pass() ? "pass" : "fail") << "\n";
  for (std::size_t k = 0; k < outer.failing_seeds.size(); ++k)
    os << "outer_minimizing.failing_seed." << k << " = " << outer.failing_seeds[k] << "\n";
  os << "stability.kappa2 = " << stability.kappa2 << "\n";
  os << "stability.trials = " << stability.trials << "\n";
  os << "stability.constant_margin = " << stability.constant_margin << "\n";
  os << "stability.margin = " << stability.margin << " tolerance " << -stability.tolerance << " "
     << (stability.pass() ? "pass" : "fail") << "\n";
  if (almost_minimizing_checked)
    os << "almost_minimizing.sup_H = " << sup_H << " tolerance " << 2.0 * C << " "
       << (almost_minimizing_pass() ? "pass" : "fail") << "\n";
  for (const auto& c : contacts) {
    os << "contact." << c.component << ".flag = " << to_string(c.flag) << "\n";
    os << "contact." << c.component << ".hausdorff = " << c.hausdorff << " tolerance " << 2.0 * h << "\n";
    os << "contact." << c.component << ".clearance = " << c.clearance << "\n";
  }
  os << "verdict = " << (pass() ? "pass" : "fail") << "\n";
  return os.str();
}

VerificationReport verify_horizon(const HorizonSurface& sigma, const InitialDataSet& ids, const DomainGrid& domain,
                                  const VerificationOptions& options) {
  VerificationReport rep;
  rep.h = domain.h();
  rep.mode = sigma.mode;
  rep.level = sigma.level;
  rep.residual = horizon_residual(sigma);
  rep.residual_tolerance = options.residual_scale * domain.h();
  rep.area = sigma.area;
  rep.vertices = sigma.mesh.vertices.size();
  rep.valid_vertices = sigma.valid_vertices();
  rep.components = sigma.components;
  rep.separates = sigma.field.grid.same_shape(domain.grid) ? separates_boundaries(domain, sigma.field) : true;
  rep.outer = outer_minimizing_probe(sigma, ids, options.probes);
  rep.stability = stability_probe(sigma, ids, kappa_squared(domain.norms, domain.dim()), options.stability_trials,
                                  options.stability_seed);
  rep.contacts = coincidence_check(sigma, inner_boundary_meshes(domain), domain.h());
  return rep;
}

}  // namespace gahf
