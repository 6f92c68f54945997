#include <doctest.h>

#include <cmath>

#include "gahf/capillary_solver.hpp"
#include "gahf/error.hpp"

using namespace gahf;

namespace {

InitialDataSet pg2() {
  Box b;
  b.lo = Vec3(-7, -7, 0);
  b.hi = Vec3(7, 7, 0);
  return InitialDataSet::from_family(AnalyticFamily::painleve_gullstrand(1.0), 2, b);
}

}  // namespace

TEST_CASE("halving schedule") {
  const auto s = ContinuationSchedule::halving(0.2, 0.0125, 0.04, 0.01);
  CHECK(s.t_values == std::vector<double>{0.2, 0.1, 0.05, 0.025, 0.0125});
  CHECK(s.eps_values == std::vector<double>{0.04, 0.02, 0.01});
  const auto odd = ContinuationSchedule::halving(0.3, 0.05, 0.04, 0.04);
  CHECK(odd.t_values.back() == doctest::Approx(0.05));
  CHECK(odd.eps_values.size() == 1);
  ContinuationSchedule bad = s;
  bad.t_values = {0.1, 0.2};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = s;
  bad.newton_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("continuation respects the barrier bounds at every step") {
  const auto ids = pg2();
  const DomainGrid dom = build_domain(ids, Shape::sphere(6), Shape::sphere(0.5), 0.1);
  const DeltaChoice dc = choose_delta(dom, ids, 0.01);
  const JangOperator op(ids, dom);
  const auto schedule = ContinuationSchedule::halving(0.2, 0.0125, 0.04, 0.01);
  const Continuation c = continue_in_t(op, schedule, dc);
  REQUIRE(c.trace.complete);
  CHECK(c.trace.steps.size() == 7);
  CHECK(c.solutions.size() == 7);
  for (std::size_t k = 0; k < c.trace.steps.size(); ++k) {
    const SolveStep& s = c.trace.steps[k];
    CHECK(s.violations() == 0);
    CHECK(s.residual_sup <= 1e-8);
    CHECK(s.min_u >= -s.C / s.t);
    CHECK(s.sup_H <= 2.0 * s.C);
    CHECK(s.warm_start == (k > 0));
  }
  // The graph blows down near the inner boundary as t decreases.
  CHECK(c.trace.steps[4].min_u < 4.0 * c.trace.steps[0].min_u);
  const GraphSolution& last = c.solutions.back();
  const auto region = blow_down_region(op, last, default_blow_down_level(c.barriers.back()));
  std::size_t inside = 0, beyond = 0;
  for (std::size_t n = 0; n < region.size(); ++n) {
    if (!region[n]) continue;
    const double r = dom.grid.position(n).norm();
    inside += r < 2.0;
    beyond += r > 2.5;
  }
  CHECK(inside > 0);
  CHECK(beyond == 0);
  CHECK(c.trace.table().find("residual") != std::string::npos);
}

TEST_CASE("grid solution follows the radial solution") {
  const auto ids = pg2();
  const auto family = AnalyticFamily::painleve_gullstrand(1.0);
  const DomainGrid dom = build_domain(ids, Shape::sphere(6), Shape::sphere(0.5), 0.1);
  const DeltaChoice dc = choose_delta(dom, ids, 0.04);
  const JangOperator op(ids, dom);
  ContinuationSchedule schedule = ContinuationSchedule::halving(0.2, 0.2, 0.04, 0.04);
  const BarrierPair bp = build_barriers(op, 0.2, 0.04, dc);
  const FixedSolve fs = solve_fixed(op, bp, schedule);

  RadialProblem rp;
  rp.t = 0.2;
  rp.eps = 0.04;
  rp.r_in = 0.5;
  rp.r_out = 6.0;
  rp.inner_value = -dc.delta / 0.2;
  const RadialSolution rs = radial_capillary_solve(family, 2, rp);
  double worst = 0.0, scale = 0.0;
  for (std::size_t n : dom.interior) {
    const double r = dom.grid.position(n).norm();
    if (r < 1.0 || r > 5.5) continue;
    worst = std::max(worst, std::abs(fs.solution.u[n] - rs.value(r, family)));
    scale = std::max(scale, std::abs(rs.value(r, family)));
  }
  CHECK(worst <= 0.05 * scale);
}

TEST_CASE("solver parameters are validated") {
  const auto ids = pg2();
  const DomainGrid dom = build_domain(ids, Shape::sphere(6), Shape::sphere(0.5), 0.1);
  const DeltaChoice dc = choose_delta(dom, ids, 0.01);
  const JangOperator op(ids, dom);
  CHECK_THROWS_AS(build_barriers(op, 0.0, 0.01, dc), Error);
  CHECK_THROWS_AS(build_barriers(op, 0.1, -1.0, dc), Error);
}
