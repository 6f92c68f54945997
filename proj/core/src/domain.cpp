#include "gahf/domain.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "gahf/error.hpp"

namespace gahf {

namespace {

Vec3 spatial(const Vec3& x, int dim) {
  Vec3 y = x;
  for (int a = dim; a < 3; ++a) y[a] = 0.0;
  return y;
}

/// Calls f(neighbour) for every node in the 3^dim block around n (excluding n).
template <class F>
void for_each_block_neighbour(const CartesianGrid& grid, std::size_t n, F&& f) {
  const auto c = grid.coords(n);
  const int kz = grid.dim == 3 ? 1 : 0;
  for (int dk = -kz; dk <= kz; ++dk)
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0 && dk == 0) continue;
        const int i = c[0] + di, j = c[1] + dj, k = c[2] + dk;
        if (i < 0 || j < 0 || k < 0 || i >= grid.size[0] || j >= grid.size[1] || k >= grid.size[2]) continue;
        f(grid.index(i, j, k));
      }
}

}  // namespace

Shape Shape::sphere(double radius, const Vec3& center) {
  Shape s;
  s.kind = Kind::Sphere;
  s.radii = Vec3::Constant(radius);
  s.center = center;
  return s;
}

Shape Shape::ellipsoid(const Vec3& radii, const Vec3& center) {
  Shape s;
  s.kind = Kind::Ellipsoid;
  s.radii = radii;
  s.center = center;
  return s;
}

Shape Shape::union_of(std::vector<Shape> parts) {
  Shape s;
  s.kind = Kind::Union;
  s.children = std::move(parts);
  return s;
}

Shape Shape::sampled_field(const CartesianGrid& grid, Field sdf) {
  Shape s;
  s.kind = Kind::Sampled;
  s.sampled_grid = grid;
  s.sampled = std::make_shared<const Field>(std::move(sdf));
  return s;
}

double Shape::sdf(const Vec3& x, int dim) const {
  switch (kind) {
    case Kind::Sphere: return spatial(x - center, dim).norm() - radii[0];
    case Kind::Ellipsoid: {
      const Vec3 d = spatial(x - center, dim);
      Vec3 q = Vec3::Zero();
      double rmin = std::numeric_limits<double>::infinity();
      for (int a = 0; a < dim; ++a) {
        q[a] = d[a] / radii[a];
        rmin = std::min(rmin, radii[a]);
      }
      return (q.norm() - 1.0) * rmin;
    }
    case Kind::Union: {
      double v = std::numeric_limits<double>::infinity();
      for (const auto& c : children) v = std::min(v, c.sdf(x, dim));
      return v;
    }
    case Kind::Sampled: return interpolate(sampled_grid, *sampled, x);
  }
  return 0.0;
}

Box Shape::bounding_box(int dim) const {
  Box b;
  switch (kind) {
    case Kind::Sphere:
    case Kind::Ellipsoid:
      b.lo = center - (kind == Kind::Sphere ? Vec3::Constant(radii[0]) : radii);
      b.hi = center + (kind == Kind::Sphere ? Vec3::Constant(radii[0]) : radii);
      break;
    case Kind::Union: {
      b.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
      b.hi = -b.lo;
      for (const auto& c : children) {
        const Box cb = c.bounding_box(dim);
        b.lo = b.lo.cwiseMin(cb.lo);
        b.hi = b.hi.cwiseMax(cb.hi);
      }
      break;
    }
    case Kind::Sampled: {
      b.lo = sampled_grid.origin;
      b.hi = sampled_grid.origin;
      for (int a = 0; a < dim; ++a) b.hi[a] += sampled_grid.h * (sampled_grid.size[a] - 1);
      break;
    }
  }
  for (int a = dim; a < 3; ++a) b.lo[a] = b.hi[a] = 0.0;
  return b;
}

double DomainGrid::boundary_separation() const {
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < grid.node_count(); ++n)
    if (std::abs(phi_inner[n]) <= grid.h) sep = std::min(sep, -phi_outer[n] + phi_inner[n]);
  return sep;
}

CartesianGrid grid_for(const Shape& outer, int dim, double h) {
  if (!(h > 0.0)) fail(ErrorKind::Parameter, "grid spacing must be positive");
  const Box b = outer.bounding_box(dim);
  CartesianGrid g;
  g.dim = dim;
  g.h = h;
  g.size = {1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    const double lo = b.lo[a] - 3.0 * h;
    const double hi = b.hi[a] + 3.0 * h;
    const int cells = static_cast<int>(std::ceil((hi - lo) / h));
    const double mid = 0.5 * (lo + hi);
    g.size[a] = cells + 1;
    g.origin[a] = mid - 0.5 * cells * h;
  }
  return g;
}

int count_components(const CartesianGrid& grid, const std::vector<char>& mask) {
  std::vector<char> seen(mask.size(), 0);
  int components = 0;
  std::deque<std::size_t> queue;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || seen[start]) continue;
    ++components;
    seen[start] = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t n = queue.front();
      queue.pop_front();
      const auto c = grid.coords(n);
      for (int a = 0; a < grid.dim; ++a)
        for (int s : {-1, 1}) {
          const int ca = c[a] + s;
          if (ca < 0 || ca >= grid.size[a]) continue;
          const std::size_t m = n + s * grid.stride(a);
          if (mask[m] && !seen[m]) {
            seen[m] = 1;
            queue.push_back(m);
          }
        }
    }
  }
  return components;
}

DomainGrid build_domain(const InitialDataSet& ids, const Shape& outer, const Shape& inner, double h) {
  return build_domain(ids, outer, inner, grid_for(outer, ids.dimension(), h));
}

DomainGrid build_domain(const InitialDataSet& ids, const Shape& outer, const Shape& inner,
                        const CartesianGrid& grid) {
  return build_domain(ids, outer, std::vector<Shape>{inner}, grid);
}

DomainGrid build_domain(const InitialDataSet& ids, const Shape& outer,
                        const std::vector<Shape>& inner_parts, const CartesianGrid& grid) {
  const int dim = ids.dimension();
  if (grid.dim != dim) fail(ErrorKind::Geometry, "grid dimension does not match the data");
  if (inner_parts.empty()) fail(ErrorKind::Geometry, "domain needs an inner boundary");
  DomainGrid d;
  d.grid = grid;
  d.outer_shape = outer;
  d.inner_shapes = inner_parts;
  const std::size_t count = grid.node_count();
  d.phi_outer.resize(count);
  d.phi_inner.assign(count, std::numeric_limits<double>::infinity());
  d.inner_parts.assign(inner_parts.size(), Field(count));
  for (std::size_t n = 0; n < count; ++n) {
    const Vec3 x = grid.position(n);
    d.phi_outer[n] = outer.sdf(x, dim);
    for (std::size_t k = 0; k < inner_parts.size(); ++k) {
      d.inner_parts[k][n] = inner_parts[k].sdf(x, dim);
      d.phi_inner[n] = std::min(d.phi_inner[n], d.inner_parts[k][n]);
    }
  }

  d.kind.assign(count, NodeKind::Exterior);
  for (std::size_t n = 0; n < count; ++n) {
    if (d.phi_outer[n] < 0.0 && d.phi_inner[n] > 0.0) {
      if (!grid.is_inner_index(n))
        fail(ErrorKind::Geometry, "domain touches the grid edge; enlarge the grid");
      d.kind[n] = NodeKind::Interior;
      d.interior.push_back(n);
    }
  }
  if (d.interior.empty()) fail(ErrorKind::Geometry, "domain has no interior nodes");

  const double sep = d.boundary_separation();
  if (!(sep > 4.0 * grid.h)) {
    std::ostringstream msg;
    msg << "boundaries d1 and d2 are " << sep << " apart, need more than 4h = " << 4.0 * grid.h;
    fail(ErrorKind::Geometry, msg.str());
  }

  for (std::size_t n : d.interior)
    for_each_block_neighbour(grid, n, [&](std::size_t m) {
      if (d.kind[m] == NodeKind::Exterior)
        d.kind[m] = d.phi_outer[m] >= 0.0 ? NodeKind::OuterGhost : NodeKind::InnerGhost;
    });

  for (std::size_t n = 0; n < count; ++n) {
    if (d.kind[n] != NodeKind::OuterGhost && d.kind[n] != NodeKind::InnerGhost) continue;
    const bool outer_side = d.kind[n] == NodeKind::OuterGhost;
    std::size_t anchor = n;
    double depth = 0.0;
    for_each_block_neighbour(grid, n, [&](std::size_t m) {
      if (d.kind[m] != NodeKind::Interior) return;
      const double dm = outer_side ? -d.phi_outer[m] : d.phi_inner[m];
      if (dm > depth) {
        depth = dm;
        anchor = m;
      }
    });
    const double beyond = outer_side ? d.phi_outer[n] : -d.phi_inner[n];
    const double rho = depth > 0.0 ? std::clamp(-beyond / depth, -2.0, 0.0) : 0.0;
    d.ghosts.push_back({n, anchor, rho});
  }

  std::vector<char> omega(count, 0), holes(count, 0);
  for (std::size_t n = 0; n < count; ++n) {
    omega[n] = d.kind[n] == NodeKind::Interior;
    holes[n] = d.phi_inner[n] <= 0.0 && d.phi_outer[n] < 0.0;
  }
  if (count_components(grid, omega) != 1) fail(ErrorKind::Geometry, "domain is not connected");
  d.inner_components = count_components(grid, holes);

  d.norms = compute_norms(ids, d);
  return d;
}

DataNorms compute_norms(const InitialDataSet& ids, const DomainGrid& domain) {
  DataNorms norms;
  const int dim = ids.dimension();
  const double eta = 0.5 * domain.h();
  for (std::size_t n = 0; n < domain.grid.node_count(); ++n) {
    if (domain.kind[n] == NodeKind::Exterior) continue;
    const Vec3 x = domain.grid.position(n);
    DataSample s;
    try {
      s = ids.evaluate(x);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Domain) continue;
      throw;
    }
    norms.p_c0 = std::max(norms.p_c0, tensor_norm(s.g, s.p, dim));
    for (int k = 0; k < dim; ++k) norms.dp_c0 = std::max(norms.dp_c0, s.dp[k].cwiseAbs().maxCoeff());

    // Ric from centred differences of the Christoffel symbols.
    std::array<Christoffel, 3> dgam;
    bool ok = true;
    for (int k = 0; k < dim && ok; ++k) {
      Vec3 e = Vec3::Zero();
      e[k] = eta;
      try {
        const Christoffel plus = christoffel(ids.evaluate(x + e), dim);
        const Christoffel minus = christoffel(ids.evaluate(x - e), dim);
        for (int m = 0; m < 3; ++m) dgam[k][m] = (plus[m] - minus[m]) / (2.0 * eta);
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) continue;
    const Christoffel gam = christoffel(s, dim);
    Mat3 ric = Mat3::Zero();
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        double v = 0.0;
        for (int k = 0; k < dim; ++k) {
          v += dgam[k][k](i, j) - dgam[j][k](i, k);
          for (int l = 0; l < dim; ++l) v += gam[k](k, l) * gam[l](i, j) - gam[k](j, l) * gam[l](i, k);
        }
        ric(i, j) = v;
      }
    const Mat3 ginv = s.g.inverse();
    const double ric2 = (ginv * ric * ginv * ric.transpose()).trace();
    norms.ric_c0 = std::max(norms.ric_c0, std::sqrt(std::max(ric2, 0.0)));
  }
  return norms;
}

}  // namespace gahf
