#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gahf/error.hpp"
#include "gahf/horizon_geometry.hpp"

using namespace gahf;

namespace {

InitialDataSet family_data(const AnalyticFamily& f, int dim, double a = 7.0) {
  Box b;
  b.lo = Vec3(-a, -a, dim == 3 ? -a : 0.0);
  b.hi = Vec3(a, a, dim == 3 ? a : 0.0);
  return InitialDataSet::from_family(f, dim, b);
}

LevelField sphere_field(const CartesianGrid& g, double r, const Vec3& c = Vec3::Zero(), double hole = 0.3) {
  LevelField f;
  f.grid = g;
  f.values.resize(g.node_count());
  f.defined.resize(g.node_count());
  for (std::size_t n = 0; n < f.values.size(); ++n) {
    const double d = (g.position(n) - c).norm();
    f.values[n] = d - r;
    f.defined[n] = g.position(n).norm() > hole;
  }
  return f;
}

}  // namespace

TEST_CASE("extracted circle is closed with second-order length") {
  const auto ids = family_data(AnalyticFamily::flat(), 2);
  for (double h : {0.1, 0.05}) {
    const CartesianGrid g = CartesianGrid::centered(2, static_cast<int>(std::lround(6.0 / h)) + 1, 3.0);
    const HorizonSurface s = extract_surface(sphere_field(g, 1.3), ids, HorizonMode::Generalized);
    CHECK(boundary_defects(s.mesh) == 0);
    CHECK(self_intersections(s.mesh) == 0);
    CHECK(s.components == 1);
    CHECK(s.area == doctest::Approx(2 * std::numbers::pi * 1.3).epsilon(2 * h * h));
    for (std::size_t v = 0; v < s.mesh.vertices.size(); ++v) {
      if (!s.valid[v]) continue;
      CHECK(s.H[v] == doctest::Approx(1.0 / 1.3).epsilon(0.02));
      CHECK(s.T[v] == 0.0);
    }
  }
}

TEST_CASE("sphere normals point out of the enclosed region") {
  const auto ids = family_data(AnalyticFamily::flat(), 3, 3);
  const CartesianGrid g = CartesianGrid::centered(3, 33, 2.0);
  const HorizonSurface s = extract_surface(sphere_field(g, 1.2), ids, HorizonMode::Generalized);
  CHECK(boundary_defects(s.mesh) == 0);
  CHECK(s.area == doctest::Approx(4 * std::numbers::pi * 1.44).epsilon(0.01));
  for (std::size_t e = 0; e < s.mesh.elements.size(); ++e)
    CHECK(s.mesh.element_normal(e).dot(s.mesh.centroid(e)) > 0.0);
  double mean_H = 0.0;
  std::size_t count = 0;
  for (std::size_t v = 0; v < s.mesh.vertices.size(); ++v)
    if (s.valid[v]) {
      mean_H += s.H[v];
      ++count;
    }
  CHECK(mean_H / count == doctest::Approx(2.0 / 1.2).epsilon(0.02));
}

TEST_CASE("level geometry matches the radial oracle on painleve-gullstrand") {
  const auto family = AnalyticFamily::painleve_gullstrand(1.0);
  for (int dim : {2, 3}) {
    const auto ids = family_data(family, dim, 4);
    const CartesianGrid g = CartesianGrid::centered(dim, dim == 2 ? 121 : 61, 3.0);
    const HorizonSurface s = extract_surface(sphere_field(g, 2.0, Vec3::Zero(), 0.5), ids, HorizonMode::Generalized);
    const RadialScalars q = radial_scalars(family, dim, 2.0);
    for (std::size_t v = 0; v < s.mesh.vertices.size(); ++v) {
      REQUIRE(s.valid[v]);
      CHECK(s.H[v] == doctest::Approx(q.H).epsilon(0.03));
      CHECK(s.T[v] == doctest::Approx(q.T).epsilon(0.03));
    }
    CHECK(horizon_residual(s) <= 0.05);
  }
}

TEST_CASE("horizon defect by mode") {
  CHECK(horizon_defect(1.0, -0.5, HorizonMode::Generalized) == 0.5);
  CHECK(horizon_defect(1.0, -0.5, HorizonMode::Mots) == 0.5);
  CHECK(horizon_defect(1.0, 0.5, HorizonMode::Mots) == 1.5);
  CHECK(horizon_defect(1.0, 0.5, HorizonMode::Generalized) == 0.5);
}

TEST_CASE("mesh distances") {
  const auto ids = family_data(AnalyticFamily::flat(), 2);
  const CartesianGrid g = CartesianGrid::centered(2, 81, 2.0);
  const HorizonSurface a = extract_surface(sphere_field(g, 1.0), ids, HorizonMode::Generalized);
  const HorizonSurface b = extract_surface(sphere_field(g, 1.25), ids, HorizonMode::Generalized);
  CHECK(hausdorff_distance(a.mesh, a.mesh) == 0.0);
  CHECK(hausdorff_distance(a.mesh, b.mesh) == doctest::Approx(0.25).epsilon(0.02));
  CHECK(min_distance(a.mesh, b.mesh) == doctest::Approx(0.25).epsilon(0.02));
  const MeshDistance d(a.mesh);
  CHECK(d(Vec3(3, 0, 0)) == doctest::Approx(2.0).epsilon(1e-3));

  const auto inside = enclosed_nodes(g, a.mesh);
  Field sign(g.node_count());
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const double r = g.position(n).norm();
    if (std::abs(r - 1.0) > 0.02) CHECK(bool(inside[n]) == (r < 1.0));
    sign[n] = inside[n] ? -1.0 : 1.0;
  }
  const Field sd = signed_distance(g, a.mesh, sign);
  for (std::size_t n = 0; n < g.node_count(); n += 7) CHECK(sd[n] == doctest::Approx(g.position(n).norm() - 1.0).epsilon(0.01).scale(1.0));
}

TEST_CASE("separate blobs give separate components") {
  const auto ids = family_data(AnalyticFamily::flat(), 2);
  const CartesianGrid g = CartesianGrid::centered(2, 81, 2.0);
  LevelField f;
  f.grid = g;
  f.values.resize(g.node_count());
  f.defined.assign(g.node_count(), 1);
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const Vec3 x = g.position(n);
    f.values[n] = std::min((x - Vec3(-1, 0, 0)).norm(), (x - Vec3(1, 0, 0)).norm()) - 0.5;
  }
  const HorizonSurface s = extract_surface(f, ids, HorizonMode::Generalized);
  CHECK(s.components == 2);
  CHECK(s.area == doctest::Approx(2 * std::numbers::pi).epsilon(0.01));
}

TEST_CASE("self intersections are detected") {
  SurfaceMesh bow;
  bow.dim = 2;
  bow.vertices = {Vec3(0, 0, 0), Vec3(1, 1, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  bow.elements = {{0, 1, 0}, {1, 2, 0}, {2, 3, 0}, {3, 0, 0}};
  CHECK(boundary_defects(bow) == 0);
  CHECK(self_intersections(bow) > 0);
  SurfaceMesh open = bow;
  open.elements.pop_back();
  CHECK(boundary_defects(open) > 0);
}

TEST_CASE("surface from an emitted mesh reproduces its geometry") {
  const auto ids = family_data(AnalyticFamily::painleve_gullstrand(1.0), 2);
  const CartesianGrid g = CartesianGrid::centered(2, 121, 3.0);
  const HorizonSurface s = extract_surface(sphere_field(g, 2.0), ids, HorizonMode::Generalized);
  const HorizonSurface back = surface_from_mesh(s.mesh, g, ids, HorizonMode::Generalized);
  CHECK(back.area == doctest::Approx(s.area));
  CHECK(back.components == 1);
  CHECK(horizon_residual(back) <= 0.1);
}

TEST_CASE("painleve-gullstrand horizon passes verification") {
  const auto ids = family_data(AnalyticFamily::painleve_gullstrand(1.0), 2);
  const DomainGrid dom = build_domain(ids, Shape::sphere(6), Shape::sphere(1), 0.1);
  LevelField f = sphere_field(dom.grid, 2.0, Vec3::Zero(), 0.5);
  const HorizonSurface s = extract_surface(f, ids, HorizonMode::Generalized);
  CHECK(separates_boundaries(dom, s.field));

  VerificationOptions o;
  o.probes.trials = 20;
  o.stability_trials = 20;
  const VerificationReport rep = verify_horizon(s, ids, dom, o);
  CHECK(rep.pass());
  CHECK(rep.residual <= rep.residual_tolerance);
  CHECK(rep.outer.failures == 0);
  CHECK(rep.stability.margin >= -rep.stability.tolerance);
  CHECK(rep.contacts.size() == 1);
  CHECK(rep.contacts[0].flag == Coincidence::Disjoint);
  CHECK(rep.text().find("verdict = pass") != std::string::npos);

  const VerificationReport again = verify_horizon(s, ids, dom, o);
  CHECK(again.text() == rep.text());
}

TEST_CASE("outer-minimizing probes are reproducible and reject a wrong seed") {
  const auto ids = family_data(AnalyticFamily::flat(), 2);
  const CartesianGrid g = CartesianGrid::centered(2, 81, 3.0);
  const HorizonSurface s = extract_surface(sphere_field(g, 1.5), ids, HorizonMode::Generalized);
  ProbeOptions o;
  o.trials = 10;
  const auto a = outer_minimizing_probe(s, ids, o);
  const auto b = outer_minimizing_probe(s, ids, o);
  CHECK(a.min_excess == b.min_excess);
  CHECK(a.pass());
  CHECK(a.min_excess > 0.0);
  o.seed = 2;
  CHECK(outer_minimizing_probe(s, ids, o).min_excess != a.min_excess);
}

TEST_CASE("surfaces on the inner boundary are flagged coincident") {
  const auto ids = family_data(AnalyticFamily::painleve_gullstrand(1.0), 2);
  const DomainGrid dom = build_domain(ids, Shape::sphere(6), Shape::sphere(1), 0.1);
  const auto inner = inner_boundary_meshes(dom);
  REQUIRE(inner.size() == 1);
  const HorizonSurface on = extract_surface(sphere_field(dom.grid, 1.0, Vec3::Zero(), 0.5), ids, HorizonMode::Generalized);
  const auto c = coincidence_check(on, inner, dom.h());
  REQUIRE(c.size() == 1);
  CHECK(c[0].flag == Coincidence::Coincident);
  const HorizonSurface far = extract_surface(sphere_field(dom.grid, 1.3, Vec3::Zero(), 0.5), ids, HorizonMode::Generalized);
  CHECK(coincidence_check(far, inner, dom.h())[0].flag == Coincidence::Disjoint);
  const HorizonSurface off =
      extract_surface(sphere_field(dom.grid, 1.2, Vec3(0.15, 0, 0), 0.5), ids, HorizonMode::Generalized);
  CHECK(coincidence_check(off, inner, dom.h())[0].flag == Coincidence::Anomaly);
}

TEST_CASE("degenerate level fields are rejected") {
  const auto ids = family_data(AnalyticFamily::flat(), 2);
  const CartesianGrid g = CartesianGrid::centered(2, 41, 2.0);
  LevelField f;
  f.grid = g;
  f.defined.assign(g.node_count(), 1);
  f.values.assign(g.node_count(), 1.0);
  CHECK_THROWS_AS(extract_surface(f, ids, HorizonMode::Generalized), Error);
}
