#include "gahf/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include "gahf/error.hpp"

namespace gahf {

Vec3 SurfaceMesh::element_normal(std::size_t e) const {
  const auto& el = elements[e];
  if (dim == 2) {
    const Vec3 t = vertices[el[1]] - vertices[el[0]];
    return Vec3(t[1], -t[0], 0.0);
  }
  const Vec3 a = vertices[el[0]], b = vertices[el[1]], c = vertices[el[2]];
  return 0.5 * (b - a).cross(c - a);
}

Vec3 SurfaceMesh::centroid(std::size_t e) const {
  const auto& el = elements[e];
  if (dim == 2) return 0.5 * (vertices[el[0]] + vertices[el[1]]);
  return (vertices[el[0]] + vertices[el[1]] + vertices[el[2]]) / 3.0;
}

namespace {

class VertexCache {
 public:
  VertexCache(const CartesianGrid& g, const Field& f, SurfaceMesh& mesh) : g_(g), f_(f), mesh_(mesh) {}

  int on_edge(std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    const std::uint64_t key = static_cast<std::uint64_t>(a) * g_.node_count() + b;
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double fa = f_[a], fb = f_[b];
    double s = fa / (fa - fb);
    s = std::clamp(s, 1e-9, 1.0 - 1e-9);
    mesh_.vertices.push_back(g_.position(a) + s * (g_.position(b) - g_.position(a)));
    const int id = static_cast<int>(mesh_.vertices.size()) - 1;
    cache_.emplace(key, id);
    return id;
  }

 private:
  const CartesianGrid& g_;
  const Field& f_;
  SurfaceMesh& mesh_;
  std::unordered_map<std::uint64_t, int> cache_;
};

void march_squares(const CartesianGrid& g, const Field& f, SurfaceMesh& mesh) {
  VertexCache cache(g, f, mesh);
  for (int j = 0; j + 1 < g.size[1]; ++j)
    for (int i = 0; i + 1 < g.size[0]; ++i) {
      const std::size_t c[4] = {g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)};
      bool neg[4];
      int count = 0;
      for (int k = 0; k < 4; ++k) count += (neg[k] = f[c[k]] < 0.0);
      if (count == 0 || count == 4) continue;
      // Crossings in counter-clockwise order; exits go from negative to positive.
      int id[4];
      bool exit[4];
      int m = 0;
      for (int k = 0; k < 4; ++k) {
        const int l = (k + 1) % 4;
        if (neg[k] == neg[l]) continue;
        id[m] = cache.on_edge(c[k], c[l]);
        exit[m] = neg[k];
        ++m;
      }
      if (m == 2) {
        const int x = exit[0] ? 0 : 1;
        mesh.elements.push_back({id[x], id[1 - x], -1});
        continue;
      }
      const double centre = 0.25 * (f[c[0]] + f[c[1]] + f[c[2]] + f[c[3]]);
      for (int k = 0; k < 4; ++k) {
        if (!exit[k]) continue;
        const int other = centre < 0.0 ? (k + 1) % 4 : (k + 3) % 4;
        mesh.elements.push_back({id[k], id[other], -1});
      }
    }
}

void march_tetrahedra(const CartesianGrid& g, const Field& f, SurfaceMesh& mesh) {
  VertexCache cache(g, f, mesh);
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int k = 0; k + 1 < g.size[2]; ++k)
    for (int j = 0; j + 1 < g.size[1]; ++j)
      for (int i = 0; i + 1 < g.size[0]; ++i) {
        bool any_neg = false, any_pos = false;
        for (int b = 0; b < 8; ++b) {
          const double v = f[g.index(i + (b & 1), j + ((b >> 1) & 1), k + ((b >> 2) & 1))];
          (v < 0.0 ? any_neg : any_pos) = true;
        }
        if (!any_neg || !any_pos) continue;
        for (const auto& p : perms) {
          std::array<int, 3> off{0, 0, 0};
          std::size_t tv[4];
          tv[0] = g.index(i, j, k);
          for (int s = 0; s < 3; ++s) {
            off[p[s]] = 1;
            tv[s + 1] = g.index(i + off[0], j + off[1], k + off[2]);
          }
          std::vector<std::size_t> negs, poss;
          for (std::size_t v : tv) (f[v] < 0.0 ? negs : poss).push_back(v);
          if (negs.empty() || poss.empty()) continue;
          Vec3 dir = Vec3::Zero();
          for (std::size_t v : poss) dir += g.position(v) / static_cast<double>(poss.size());
          for (std::size_t v : negs) dir -= g.position(v) / static_cast<double>(negs.size());
          auto emit = [&](int a, int b, int c) {
            const Vec3 n = (mesh.vertices[b] - mesh.vertices[a]).cross(mesh.vertices[c] - mesh.vertices[a]);
            if (n.dot(dir) < 0.0) std::swap(b, c);
            mesh.elements.push_back({a, b, c});
          };
          if (negs.size() == 1 || poss.size() == 1) {
            const bool lone_neg = negs.size() == 1;
            const std::size_t lone = lone_neg ? negs[0] : poss[0];
            const auto& rest = lone_neg ? poss : negs;
            emit(cache.on_edge(lone, rest[0]), cache.on_edge(lone, rest[1]), cache.on_edge(lone, rest[2]));
          } else {
            const int ac = cache.on_edge(negs[0], poss[0]);
            const int ad = cache.on_edge(negs[0], poss[1]);
            const int bd = cache.on_edge(negs[1], poss[1]);
            const int bc = cache.on_edge(negs[1], poss[0]);
            emit(ac, ad, bd);
            emit(ac, bd, bc);
          }
        }
      }
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

double point_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double l2 = ab.squaredNorm();
  const double s = l2 > 0.0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

/// Closest point on a triangle (Ericson, Real-Time Collision Detection 5.1.5).
double point_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return ap.norm();
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return bp.norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return (p - (a + d1 / (d1 - d3) * ab)).norm();
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return cp.norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return (p - (a + d2 / (d2 - d6) * ac)).norm();
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return (p - (b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b))).norm();
  const double denom = 1.0 / (va + vb + vc);
  return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

bool segments_cross(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  auto orient = [](const Vec3& p, const Vec3& q, const Vec3& r) {
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
  };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

/// Proper crossing of segment pq through the interior of triangle abc.
bool segment_hits_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  const double tol = 1e-10;
  const Vec3 dir = q - p, e1 = b - a, e2 = c - a;
  const Vec3 h = dir.cross(e2);
  const double det = e1.dot(h);
  if (std::abs(det) < 1e-14 * dir.norm() * e1.norm() * e2.norm()) return false;
  const Vec3 s = p - a;
  const double u = s.dot(h) / det;
  if (u <= tol || u >= 1.0 - tol) return false;
  const Vec3 qv = s.cross(e1);
  const double v = dir.dot(qv) / det;
  if (v <= tol || u + v >= 1.0 - tol) return false;
  const double t = e2.dot(qv) / det;
  return t > tol && t < 1.0 - tol;
}

struct Buckets {
  Vec3 lo = Vec3::Zero();
  double cell = 1.0;
  std::array<int, 3> dims{1, 1, 1};
  std::vector<std::vector<int>> cells;

  std::array<int, 3> locate(const Vec3& x) const {
    std::array<int, 3> c{};
    for (int a = 0; a < 3; ++a) c[a] = std::clamp(static_cast<int>(std::floor((x[a] - lo[a]) / cell)), 0, dims[a] - 1);
    return c;
  }
  std::size_t flat(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(dims[0]) * (j + static_cast<std::size_t>(dims[1]) * k);
  }
};

Buckets build_buckets(const SurfaceMesh& mesh) {
  Buckets bk;
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  double size = 0.0;
  for (const Vec3& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  for (std::size_t e = 0; e < mesh.elements.size(); ++e)
    for (std::size_t k = 1; k < mesh.element_size(); ++k)
      size = std::max(size, (mesh.vertices[mesh.elements[e][k]] - mesh.vertices[mesh.elements[e][0]]).norm());
  bk.lo = lo;
  bk.cell = std::max(2.0 * size, 1e-9);
  for (int a = 0; a < 3; ++a) bk.dims[a] = std::max(1, static_cast<int>(std::ceil((hi[a] - lo[a]) / bk.cell)) + 1);
  if (static_cast<double>(bk.dims[0]) * bk.dims[1] * bk.dims[2] > 4e7) fail(ErrorKind::Extraction, "mesh too large for bucketing");
  bk.cells.resize(static_cast<std::size_t>(bk.dims[0]) * bk.dims[1] * bk.dims[2]);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    Vec3 elo = mesh.vertices[mesh.elements[e][0]], ehi = elo;
    for (std::size_t k = 1; k < mesh.element_size(); ++k) {
      elo = elo.cwiseMin(mesh.vertices[mesh.elements[e][k]]);
      ehi = ehi.cwiseMax(mesh.vertices[mesh.elements[e][k]]);
    }
    const auto a = bk.locate(elo), b = bk.locate(ehi);
    for (int k = a[2]; k <= b[2]; ++k)
      for (int j = a[1]; j <= b[1]; ++j)
        for (int i = a[0]; i <= b[0]; ++i) bk.cells[bk.flat(i, j, k)].push_back(static_cast<int>(e));
  }
  return bk;
}

}  // namespace

SurfaceMesh extract_isosurface(const CartesianGrid& grid, const Field& f) {
  if (f.size() != grid.node_count()) fail(ErrorKind::Extraction, "field does not match the grid");
  // Values near zero move off the node so crossings never collapse onto it.
  const double snap = 1e-4 * grid.h;
  Field g = f;
  for (double& v : g)
    if (std::abs(v) < snap) v = snap;
  SurfaceMesh mesh;
  mesh.dim = grid.dim;
  if (grid.dim == 2)
    march_squares(grid, g, mesh);
  else
    march_tetrahedra(grid, g, mesh);
  return mesh;
}

std::size_t boundary_defects(const SurfaceMesh& mesh) {
  if (mesh.dim == 2) {
    std::vector<int> starts(mesh.vertices.size(), 0), ends(mesh.vertices.size(), 0);
    for (const auto& el : mesh.elements) {
      ++starts[el[0]];
      ++ends[el[1]];
    }
    std::size_t defects = 0;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) defects += (starts[v] != 1 || ends[v] != 1);
    return defects;
  }
  std::map<std::pair<int, int>, int> edges;
  for (const auto& el : mesh.elements)
    for (int k = 0; k < 3; ++k) {
      int a = el[k], b = el[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edges[{a, b}];
    }
  std::size_t defects = 0;
  for (const auto& [edge, count] : edges) defects += count != 2;
  return defects;
}

int label_components(const SurfaceMesh& mesh, std::vector<int>& element_component) {
  UnionFind uf(mesh.vertices.size());
  for (const auto& el : mesh.elements)
    for (std::size_t k = 1; k < mesh.element_size(); ++k) uf.unite(el[0], el[k]);
  std::unordered_map<int, int> label;
  element_component.assign(mesh.elements.size(), -1);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const int root = uf.find(mesh.elements[e][0]);
    auto it = label.find(root);
    if (it == label.end()) it = label.emplace(root, static_cast<int>(label.size())).first;
    element_component[e] = it->second;
  }
  return static_cast<int>(label.size());
}

SurfaceMesh component_mesh(const SurfaceMesh& mesh, const std::vector<int>& element_component, int label) {
  SurfaceMesh out;
  out.dim = mesh.dim;
  std::vector<int> remap(mesh.vertices.size(), -1);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    if (element_component[e] != label) continue;
    std::array<int, 3> el{-1, -1, -1};
    for (std::size_t k = 0; k < mesh.element_size(); ++k) {
      const int v = mesh.elements[e][k];
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(mesh.vertices[v]);
      }
      el[k] = remap[v];
    }
    out.elements.push_back(el);
  }
  return out;
}

std::size_t self_intersections(const SurfaceMesh& mesh) {
  if (mesh.empty()) return 0;
  const Buckets bk = build_buckets(mesh);
  const std::size_t es = mesh.element_size();
  std::size_t hits = 0;
  std::vector<std::pair<int, int>> seen;
  for (const auto& cell : bk.cells)
    for (std::size_t x = 0; x < cell.size(); ++x)
      for (std::size_t y = x + 1; y < cell.size(); ++y) {
        int e = cell[x], f = cell[y];
        if (e > f) std::swap(e, f);
        const auto& A = mesh.elements[e];
        const auto& B = mesh.elements[f];
        bool shared = false;
        for (std::size_t i = 0; i < es; ++i)
          for (std::size_t j = 0; j < es; ++j) shared = shared || A[i] == B[j];
        if (shared) continue;
        bool cross;
        if (mesh.dim == 2) {
          cross = segments_cross(mesh.vertices[A[0]], mesh.vertices[A[1]], mesh.vertices[B[0]], mesh.vertices[B[1]]);
        } else {
          cross = false;
          for (int k = 0; k < 3 && !cross; ++k) {
            cross = segment_hits_triangle(mesh.vertices[A[k]], mesh.vertices[A[(k + 1) % 3]], mesh.vertices[B[0]],
                                          mesh.vertices[B[1]], mesh.vertices[B[2]]) ||
                    segment_hits_triangle(mesh.vertices[B[k]], mesh.vertices[B[(k + 1) % 3]], mesh.vertices[A[0]],
                                          mesh.vertices[A[1]], mesh.vertices[A[2]]);
          }
        }
        if (cross) seen.emplace_back(e, f);
      }
  std::sort(seen.begin(), seen.end());
  hits = static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
  return hits;
}

MeshDistance::MeshDistance(const SurfaceMesh& mesh) : mesh_(mesh) {
  if (mesh.empty()) return;
  Buckets bk = build_buckets(mesh);
  lo_ = bk.lo;
  cell_ = bk.cell;
  dims_ = bk.dims;
  buckets_ = std::move(bk.cells);
}

double MeshDistance::element_distance(std::size_t e, const Vec3& x) const {
  const auto& el = mesh_.elements[e];
  if (mesh_.dim == 2) return point_segment(x, mesh_.vertices[el[0]], mesh_.vertices[el[1]]);
  return point_triangle(x, mesh_.vertices[el[0]], mesh_.vertices[el[1]], mesh_.vertices[el[2]]);
}

double MeshDistance::operator()(const Vec3& x) const {
  if (mesh_.empty()) return std::numeric_limits<double>::infinity();
  std::array<int, 3> c{};
  double outside = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double rel = (x[a] - lo_[a]) / cell_;
    c[a] = std::clamp(static_cast<int>(std::floor(rel)), 0, dims_[a] - 1);
  }
  {
    Vec3 hi = lo_ + cell_ * Vec3(dims_[0], dims_[1], dims_[2]);
    Vec3 gap = (lo_ - x).cwiseMax(x - hi).cwiseMax(Vec3::Zero());
    outside = gap.norm();
  }
  double best = std::numeric_limits<double>::infinity();
  const int max_ring = std::max({dims_[0], dims_[1], dims_[2]});
  for (int ring = 0; ring <= max_ring; ++ring) {
    const double reach = std::max(ring - 1, 0) * cell_;
    if (best < std::sqrt(outside * outside + reach * reach)) break;
    for (int k = c[2] - ring; k <= c[2] + ring; ++k)
      for (int j = c[1] - ring; j <= c[1] + ring; ++j)
        for (int i = c[0] - ring; i <= c[0] + ring; ++i) {
          if (std::max({std::abs(i - c[0]), std::abs(j - c[1]), std::abs(k - c[2])}) != ring) continue;
          if (i < 0 || j < 0 || k < 0 || i >= dims_[0] || j >= dims_[1] || k >= dims_[2]) continue;
          const std::size_t b = static_cast<std::size_t>(i) + static_cast<std::size_t>(dims_[0]) * (j + static_cast<std::size_t>(dims_[1]) * k);
          for (int e : buckets_[b]) best = std::min(best, element_distance(e, x));
        }
  }
  return best;
}

std::vector<char> enclosed_nodes(const CartesianGrid& grid, const SurfaceMesh& mesh) {
  std::vector<char> inside(grid.node_count(), 0);
  if (mesh.empty()) return inside;
  // Offsets keep the rays off mesh vertices lying on grid lines.
  const double dy = 1.234567e-7 * grid.h, dz = 7.654321e-8 * grid.h;
  std::vector<double> hits;
  for (int k = 0; k < grid.size[2]; ++k)
    for (int j = 0; j < grid.size[1]; ++j) {
      const Vec3 row = grid.position(grid.index(0, j, k));
      const double y = row[1] + dy, z = row[2] + dz;
      hits.clear();
      for (const auto& el : mesh.elements) {
        if (mesh.dim == 2) {
          const Vec3& a = mesh.vertices[el[0]];
          const Vec3& b = mesh.vertices[el[1]];
          if ((a[1] > y) == (b[1] > y)) continue;
          hits.push_back(a[0] + (y - a[1]) * (b[0] - a[0]) / (b[1] - a[1]));
          continue;
        }
        const Vec3& a = mesh.vertices[el[0]];
        const Vec3& b = mesh.vertices[el[1]];
        const Vec3& c = mesh.vertices[el[2]];
        // Barycentric test in the (y, z) projection.
        const double d = (b[1] - a[1]) * (c[2] - a[2]) - (c[1] - a[1]) * (b[2] - a[2]);
        if (d == 0.0) continue;
        const double l1 = ((y - a[1]) * (c[2] - a[2]) - (c[1] - a[1]) * (z - a[2])) / d;
        const double l2 = ((b[1] - a[1]) * (z - a[2]) - (y - a[1]) * (b[2] - a[2])) / d;
        if (l1 < 0.0 || l2 < 0.0 || l1 + l2 > 1.0) continue;
        hits.push_back(a[0] + l1 * (b[0] - a[0]) + l2 * (c[0] - a[0]));
      }
      std::sort(hits.begin(), hits.end());
      std::size_t passed = 0;
      for (int i = 0; i < grid.size[0]; ++i) {
        const double x = row[0] + i * grid.h;
        while (passed < hits.size() && hits[passed] < x) ++passed;
        inside[grid.index(i, j, k)] = passed % 2 == 1;
      }
    }
  return inside;
}

double hausdorff_distance(const SurfaceMesh& a, const SurfaceMesh& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  const MeshDistance da(a), db(b);
  double h = 0.0;
  for (const Vec3& v : a.vertices) h = std::max(h, db(v));
  for (const Vec3& v : b.vertices) h = std::max(h, da(v));
  return h;
}

double min_distance(const SurfaceMesh& a, const SurfaceMesh& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  const MeshDistance da(a), db(b);
  double m = std::numeric_limits<double>::infinity();
  for (const Vec3& v : a.vertices) m = std::min(m, db(v));
  for (const Vec3& v : b.vertices) m = std::min(m, da(v));
  return m;
}

}  // namespace gahf
