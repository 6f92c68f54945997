#include <doctest.h>

#include <cmath>
#include <random>

#include "gahf/barriers.hpp"
#include "gahf/error.hpp"
#include "gahf/jang_operator.hpp"

using namespace gahf;

namespace {

InitialDataSet data(const AnalyticFamily& f, int dim, double a) {
  Box b;
  b.lo = Vec3(-a, -a, dim == 3 ? -a : 0.0);
  b.hi = Vec3(a, a, dim == 3 ? a : 0.0);
  return InitialDataSet::from_family(f, dim, b);
}

double jacobian_error(const JangOperator& op, std::mt19937& rng, double amplitude) {
  const DomainGrid& dom = op.domain();
  std::normal_distribution<double> N;
  GraphSolution s;
  s.t = 0.1;
  s.eps = 0.05;
  s.u.assign(dom.grid.node_count(), 0.0);
  s.boundary.assign(s.u.size(), -0.5);
  for (std::size_t n : dom.interior) s.u[n] = amplitude * N(rng);
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

}  // namespace

TEST_CASE("jacobian matches finite differences") {
  std::mt19937 rng(11);
  for (int dim : {2, 3}) {
    const auto ids = data(AnalyticFamily::painleve_gullstrand(1.0), dim, 4);
    const DomainGrid dom = build_domain(ids, Shape::sphere(3), Shape::sphere(1), dim == 2 ? 0.2 : 0.4);
    for (OperatorMode mode : {OperatorMode::Generalized, OperatorMode::Mots}) {
      const JangOperator op(ids, dom, mode, Field(dom.grid.node_count(), 0.7));
      for (int trial = 0; trial < 3; ++trial) CHECK(jacobian_error(op, rng, 0.3) <= 1e-4);
    }
  }
}

TEST_CASE("planes have zero mean curvature in flat space") {
  const auto ids = data(AnalyticFamily::flat(), 2, 4);
  const DomainGrid dom = build_domain(ids, Shape::sphere(3), Shape::sphere(1), 0.1);
  const JangOperator op(ids, dom);
  GraphSolution s;
  s.t = 0.2;
  s.eps = 0.01;
  s.u.assign(dom.grid.node_count(), 0.0);
  s.boundary.assign(s.u.size(), 0.0);
  for (std::size_t n = 0; n < s.u.size(); ++n) s.u[n] = 0.3 * dom.grid.position(n)[0] - 0.7 * dom.grid.position(n)[1];
  double worst = 0.0;
  for (std::size_t n : dom.interior) {
    if (dom.dist_inner(n) < 3 * dom.h() || dom.dist_outer(n) < 3 * dom.h()) continue;
    worst = std::max(worst, std::abs(op.mean_curvature(s.u, n)));
    CHECK(graph_second_fundamental_form(op, s.u, n) <= 1e-20);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("spherical cap curvature converges at second order") {
  const double R = 4.0;
  double previous = 0.0;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto ids = data(AnalyticFamily::flat(), 2, 4);
    const DomainGrid dom = build_domain(ids, Shape::sphere(2.5), Shape::sphere(0.5), h);
    const JangOperator op(ids, dom);
    Field u(dom.grid.node_count(), 0.0);
    for (std::size_t n = 0; n < u.size(); ++n) u[n] = std::sqrt(R * R - dom.grid.position(n).squaredNorm());
    double worst = 0.0;
    for (std::size_t n : dom.interior) worst = std::max(worst, std::abs(std::abs(op.mean_curvature(u, n)) - 2.0 / R));
    if (previous > 0.0) CHECK(worst <= 0.35 * previous);
    previous = worst;
  }
  CHECK(previous <= 1e-3);
}

TEST_CASE("residual of the zero graph") {
  const auto ids = data(AnalyticFamily::flat(), 2, 4);
  const DomainGrid dom = build_domain(ids, Shape::sphere(3), Shape::sphere(1), 0.2);
  const JangOperator op(ids, dom);
  GraphSolution s;
  s.t = 0.2;
  s.eps = 0.01;
  s.u.assign(dom.grid.node_count(), 0.0);
  s.boundary.assign(s.u.size(), 0.0);
  op.fill_ghosts(s);
  const ResidualField r = op.residual(s);
  for (std::size_t n : dom.interior) CHECK(r.values[n] == doctest::Approx(-0.01).epsilon(1e-12));
  CHECK_THROWS_AS(regularized_trace(op, s, 0.0), Error);
}

TEST_CASE("curvature bound constant") {
  DataNorms n;
  n.p_c0 = 1.0;
  n.dp_c0 = 2.0;
  n.ric_c0 = 3.0;
  CHECK(kappa_squared(n, 3) == doctest::Approx(82.0));
  CHECK(kappa_squared(n, 2) == doctest::Approx(55.0));
}

TEST_CASE("domain classification") {
  const auto ids = data(AnalyticFamily::painleve_gullstrand(1.0), 2, 7);
  const DomainGrid dom = build_domain(ids, Shape::sphere(6), Shape::sphere(1), 0.1);
  CHECK(dom.inner_components == 1);
  CHECK(dom.boundary_separation() == doctest::Approx(5.0).epsilon(0.05));
  std::size_t outer = 0, inner = 0;
  for (NodeKind k : dom.kind) {
    outer += k == NodeKind::OuterGhost;
    inner += k == NodeKind::InnerGhost;
  }
  CHECK(outer > inner);
  CHECK(inner > 0);
  for (std::size_t n : dom.interior) {
    CHECK(dom.dist_outer(n) > 0.0);
    CHECK(dom.dist_inner(n) > 0.0);
  }
  CHECK(dom.norms.p_c0 > 0.0);
}
