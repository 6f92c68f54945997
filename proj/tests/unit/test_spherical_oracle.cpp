#include <doctest.h>

#include <cmath>

#include "gahf/error.hpp"
#include "gahf/spherical_oracle.hpp"

using namespace gahf;

TEST_CASE("painleve-gullstrand coordinate spheres") {
  const auto f = AnalyticFamily::painleve_gullstrand(1.0);
  CHECK(radial_scalars(f, 2, 1.0).H == doctest::Approx(1.0));
  CHECK(radial_scalars(f, 2, 1.0).T == doctest::Approx(-1.4142135623730951));
  CHECK(radial_scalars(f, 3, 3.0).H == doctest::Approx(0.66666666666666663));
  CHECK(radial_scalars(f, 3, 3.0).T == doctest::Approx(-0.54433105395181736));
  CHECK(radial_scalars(f, 3, 2.0).T == doctest::Approx(-1.0));
}

TEST_CASE("horizon radii") {
  const auto pg = AnalyticFamily::painleve_gullstrand(1.0);
  for (int dim : {2, 3})
    for (HorizonMode mode : {HorizonMode::Generalized, HorizonMode::Mots}) {
      const auto r = horizon_radius(pg, dim, mode);
      REQUIRE(r.has_value());
      CHECK(std::abs(*r - 2.0) <= 1e-10);
      const RadialScalars q = radial_scalars(pg, dim, *r);
      const double defect = mode == HorizonMode::Mots ? q.H + q.T : q.H - std::abs(q.T);
      CHECK(std::abs(defect) <= 1e-10);
    }
  const auto sch = horizon_radius(AnalyticFamily::isotropic_schwarzschild(1.0), 3, HorizonMode::Generalized);
  REQUIRE(sch.has_value());
  CHECK(std::abs(*sch - 0.5) <= 1e-10);
  CHECK_FALSE(horizon_radius(AnalyticFamily::flat(), 3, HorizonMode::Generalized).has_value());
}

TEST_CASE("mass scaling of the horizon radius") {
  for (double m : {0.3, 1.0, 2.5}) {
    const double r1 = *horizon_radius(AnalyticFamily::painleve_gullstrand(m), 2, HorizonMode::Generalized);
    for (double lambda : {0.5, 2.0, 4.0}) {
      const double rl = *horizon_radius(AnalyticFamily::painleve_gullstrand(lambda * m), 2, HorizonMode::Generalized);
      CHECK(std::abs(rl - lambda * r1) <= 1e-10 * lambda * r1 * 10);
    }
  }
}

TEST_CASE("schwarzschild minimal sphere") {
  const auto f = AnalyticFamily::isotropic_schwarzschild(1.0);
  CHECK(radial_scalars(f, 3, 1.0).H == doctest::Approx(0.29629629629629634));
  CHECK(radial_scalars(f, 3, 0.5).H == doctest::Approx(0.0).scale(1.0));
  CHECK(radial_scalars(f, 3, 0.25).H < 0.0);
  CHECK(radial_length_factor(f, 0.5) == doctest::Approx(4.0));
}

TEST_CASE("radial capillary solution satisfies its boundary data") {
  const auto f = AnalyticFamily::painleve_gullstrand(1.0);
  RadialProblem p;
  p.t = 0.1;
  p.eps = 0.05;
  p.r_in = 1.0;
  p.r_out = 6.0;
  p.inner_value = -1.0;
  const RadialSolution s = radial_capillary_solve(f, 2, p);
  CHECK(s.value(1.0, f) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(s.value(6.0, f) == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
  for (std::size_t k = 1; k < s.r.size(); ++k) CHECK(s.r[k] > s.r[k - 1]);
}

TEST_CASE("oracle errors") {
  CHECK_THROWS_AS(radial_scalars(AnalyticFamily::painleve_gullstrand(1.0), 2, 0.0), Error);
  CHECK_THROWS_AS(radial_scalars(AnalyticFamily::brill_lindquist(1, 1, 2), 3, 1.0), Error);
  CHECK(parse_horizon_mode("mots") == HorizonMode::Mots);
  CHECK(to_string(HorizonMode::Generalized) == "generalized");
  CHECK_THROWS_AS(parse_horizon_mode("marginal"), Error);
}

TEST_CASE("oracle table") {
  const std::string t = oracle_table(AnalyticFamily::painleve_gullstrand(1.0), 2, 1.0, 3.0, 3);
  CHECK(t.rfind("r,H,T\n", 0) == 0);
  CHECK(t.find("2,0.5,-0.5") != std::string::npos);
}
