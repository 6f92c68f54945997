#include "gahf/level_set.hpp"

#include <cmath>

namespace gahf {

namespace {

Vec3 fd_gradient(const ScalarFunction& f, const Vec3& x, double step, int dim) {
  Vec3 grad = Vec3::Zero();
  for (int a = 0; a < dim; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = step;
    grad[a] = (f(x + e) - f(x - e)) / (2.0 * step);
  }
  return grad;
}

}  // namespace

LevelSetPoint level_set_geometry(const InitialDataSet& ids, const ScalarFunction& f, const Vec3& x, double step) {
  const int dim = ids.dimension();
  LevelSetPoint lp;
  lp.x = x;
  const DataSample s = ids.evaluate(x);
  const Mat3 ginv = s.g.inverse();
  const Vec3 df = fd_gradient(f, x, step, dim);
  lp.grad_norm = std::sqrt(df.dot(ginv * df));
  if (lp.grad_norm > 0.0) lp.normal = ginv * df / lp.grad_norm;

  // div_g of the unit normal: (1/sqrt g) d_i (sqrt g nu^i).
  double div = 0.0;
  for (int a = 0; a < dim; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = step;
    double flux[2];
    for (int side = 0; side < 2; ++side) {
      const Vec3 y = side == 0 ? Vec3(x + e) : Vec3(x - e);
      const DataSample sy = ids.evaluate(y);
      const Mat3 gi = sy.g.inverse();
      const Vec3 dy = fd_gradient(f, y, step, dim);
      const double norm = std::sqrt(std::max(dy.dot(gi * dy), 1e-300));
      const double sqrtg = std::sqrt(sy.g.topLeftCorner(dim, dim).determinant());
      flux[side] = sqrtg * (gi * dy)[a] / norm;
    }
    div += (flux[0] - flux[1]) / (2.0 * step);
  }
  lp.H = div / std::sqrt(s.g.topLeftCorner(dim, dim).determinant());
  lp.trace_p = (ginv * s.p).trace() - lp.normal.dot(s.p * lp.normal);
  return lp;
}

std::vector<Vec3> level_set_samples(const CartesianGrid& grid, const ScalarFunction& f, double level) {
  std::vector<Vec3> out;
  const double step = 0.25 * grid.h;
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    Vec3 x = grid.position(n);
    if (std::abs(f(x) - level) > grid.h) continue;
    bool ok = false;
    for (int it = 0; it < 6; ++it) {
      const double r = f(x) - level;
      if (std::abs(r) < 1e-10 * std::max(1.0, grid.h)) {
        ok = true;
        break;
      }
      const Vec3 g = fd_gradient(f, x, step, grid.dim);
      const double g2 = g.squaredNorm();
      if (g2 < 1e-12) break;
      x -= r * g / g2;
    }
    if (!ok && std::abs(f(x) - level) < 1e-6 * grid.h) ok = true;
    if (ok && (x - grid.position(n)).norm() < 2.0 * grid.h) out.push_back(x);
  }
  return out;
}

double smoothstep(double a, double b, double s) {
  if (s <= a) return 0.0;
  if (s >= b) return 1.0;
  const double x = (s - a) / (b - a);
  return x * x * (3.0 - 2.0 * x);
}

}  // namespace gahf
