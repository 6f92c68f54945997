#include <doctest.h>

#include <random>

#include "gahf/error.hpp"
#include "gahf/initial_data.hpp"

using namespace gahf;

namespace {

Box cube(double a) {
  Box b;
  b.lo = Vec3::Constant(-a);
  b.hi = Vec3::Constant(a);
  return b;
}

}  // namespace

TEST_CASE("painleve-gullstrand tensor at a fixed point") {
  const auto ids = InitialDataSet::from_family(AnalyticFamily::painleve_gullstrand(1.0), 3, cube(5));
  const DataSample s = ids.evaluate(Vec3(1, 2, 0));
  CHECK(s.p(0, 0) == doctest::Approx(-0.29606395376335792).epsilon(1e-14));
  CHECK(s.p(0, 1) == doctest::Approx(0.25376910322573543).epsilon(1e-14));
  CHECK(s.p(1, 1) == doctest::Approx(0.084589701075245202).epsilon(1e-14));
  CHECK(s.p(2, 2) == doctest::Approx(-0.42294850537622564).epsilon(1e-14));
  CHECK(s.dp[0](0, 0) == doctest::Approx(0.29183446870959567).epsilon(1e-12));
  CHECK(s.g.isApprox(Mat3::Identity()));
  CHECK(tensor_norm(s.g, s.p, 3) == doctest::Approx(0.42294850537622564));
}

TEST_CASE("two-dimensional data pads the z block") {
  const auto ids = InitialDataSet::from_family(AnalyticFamily::painleve_gullstrand(1.0), 2, cube(5));
  const DataSample s = ids.evaluate(Vec3(1, 2, 0));
  CHECK(s.p(2, 2) == 0.0);
  CHECK(s.g(2, 2) == 1.0);
  CHECK(s.p(0, 1) == doctest::Approx(0.25376910322573543));
}

TEST_CASE("isotropic schwarzschild metric") {
  const auto ids = InitialDataSet::from_family(AnalyticFamily::isotropic_schwarzschild(1.0), 3, cube(5));
  const DataSample s = ids.evaluate(Vec3(0.6, 0.8, 0));
  CHECK(s.g(0, 0) == doctest::Approx(5.0625));
  CHECK(s.g(0, 1) == 0.0);
  CHECK(s.dg[0](1, 1) == doctest::Approx(-4.05));
  CHECK(s.p.norm() == 0.0);
}

TEST_CASE("brill-lindquist conformal factor") {
  const auto ids = InitialDataSet::from_family(AnalyticFamily::brill_lindquist(1.0, 0.5, 2.0), 3, cube(5));
  CHECK(ids.evaluate(Vec3(0, 1, 0)).g(0, 0) == doctest::Approx(5.48454325268579));
}

TEST_CASE("evaluation errors") {
  const auto ids = InitialDataSet::from_family(AnalyticFamily::painleve_gullstrand(1.0), 3, cube(2));
  CHECK_THROWS_AS(ids.evaluate(Vec3(3, 0, 0)), Error);
  try {
    ids.evaluate(Vec3(3, 0, 0));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  try {
    ids.evaluate(Vec3::Zero());
    FAIL("centre evaluated");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  CHECK_THROWS_AS(AnalyticFamily::painleve_gullstrand(-1.0).validate(), Error);
}

TEST_CASE("derivatives match finite differences") {
  const auto ids = InitialDataSet::from_family(AnalyticFamily::brill_lindquist(1.0, 0.7, 1.5), 3, cube(5));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 x(U(rng), U(rng), U(rng));
    if (std::min((x - Vec3(0.75, 0, 0)).norm(), (x + Vec3(0.75, 0, 0)).norm()) < 0.5) continue;
    const DataSample s = ids.evaluate(x);
    for (int k = 0; k < 3; ++k) {
      const double d = 1e-5;
      const Vec3 e = Vec3::Unit(k) * d;
      const Mat3 fd = (ids.evaluate(x + e).g - ids.evaluate(x - e).g) / (2 * d);
      CHECK((fd - s.dg[k]).norm() <= 1e-6 * (1.0 + s.dg[k].norm()));
    }
  }
}

TEST_CASE("christoffel symbols vanish for flat data") {
  const auto ids = InitialDataSet::from_family(AnalyticFamily::flat(), 3, cube(1));
  const Christoffel c = christoffel(ids.evaluate(Vec3(0.1, 0.2, 0.3)), 3);
  for (const Mat3& m : c) CHECK(m.norm() == 0.0);
}

TEST_CASE("idsgrid round trip reproduces nodal values") {
  for (int dim : {2, 3}) {
    const auto pg = InitialDataSet::from_family(AnalyticFamily::painleve_gullstrand(1.0), dim, cube(5));
    CartesianGrid g;
    g.dim = dim;
    g.size = {9, 8, dim == 3 ? 7 : 1};
    g.origin = Vec3(1.0, -2.0, dim == 3 ? 0.5 : 0.0);
    g.h = 0.25;
    const std::string text = write_grid_text(pg, g);
    const InitialDataSet back = parse_grid_text(text, "roundtrip");
    CHECK(back.dimension() == dim);
    for (std::size_t n = 0; n < g.node_count(); n += 5) {
      const Vec3 x = g.position(n);
      const DataSample a = pg.evaluate(x), b = back.evaluate(x);
      CHECK((a.g - b.g).norm() <= 1e-14);
      CHECK((a.p - b.p).norm() <= 1e-14);
    }
  }
}

TEST_CASE("idsgrid parse errors name the line") {
  const std::string bad = "IDSGRID1\ndim 2\nsize 2 2\norigin 0 0\nspacing 1\n1 0 1 0 0 0\n";
  try {
    parse_grid_text(bad, "bad.ids");
    FAIL("parsed a truncated file");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("bad.ids") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_grid_text("IDSGRID2\n", "x"), Error);
  CHECK_THROWS_AS(load_grid_file("/nonexistent/data.ids"), Error);
}

TEST_CASE("idsgrid rejects an indefinite metric") {
  std::string text = "IDSGRID1\ndim 2\nsize 2 2\norigin 0 0\nspacing 1\n";
  for (int q = 0; q < 4; ++q) text += q == 2 ? "-1 0 1 0 0 0\n" : "1 0 1 0 0 0\n";
  try {
    parse_grid_text(text, "neg.ids");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
  }
}
