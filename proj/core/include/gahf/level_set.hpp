#pragma once

#include <functional>
#include <vector>

#include "gahf/grid.hpp"
#include "gahf/initial_data.hpp"

namespace gahf {

using ScalarFunction = std::function<double(const Vec3&)>;

/// Geometry of the level set of f through x, normal g^{-1} df / |df|_g.
struct LevelSetPoint {
  Vec3 x = Vec3::Zero();
  Vec3 normal = Vec3::Zero();  // g-unit, contravariant
  double H = 0.0;              // div_g(normal)
  double trace_p = 0.0;        // tr_g p - p(normal, normal)
  double grad_norm = 0.0;      // |df|_g
};

/// Finite differences of f with spacing `step`.
LevelSetPoint level_set_geometry(const InitialDataSet& ids, const ScalarFunction& f, const Vec3& x, double step);

/// Points on {f = level}: grid nodes within one spacing of the level set,
/// projected by a few Newton steps. Points that fail to converge are dropped.
std::vector<Vec3> level_set_samples(const CartesianGrid& grid, const ScalarFunction& f, double level);

/// Smoothstep from 0 (s <= a) to 1 (s >= b).
double smoothstep(double a, double b, double s);

}  // namespace gahf
