#include "gahf/grid.hpp"

#include <algorithm>
#include <cmath>

namespace gahf {

CartesianGrid CartesianGrid::centered(int dim, int nodes, double half_width) {
  CartesianGrid g;
  g.dim = dim;
  g.size = {nodes, nodes, dim == 3 ? nodes : 1};
  g.h = 2.0 * half_width / (nodes - 1);
  g.origin = Vec3::Zero();
  for (int a = 0; a < dim; ++a) g.origin[a] = -half_width;
  return g;
}

bool CartesianGrid::is_inner_index(std::size_t idx) const {
  const auto c = coords(idx);
  for (int a = 0; a < dim; ++a)
    if (c[a] < 1 || c[a] > size[a] - 2) return false;
  return true;
}

bool CartesianGrid::same_shape(const CartesianGrid& other) const {
  return dim == other.dim && size == other.size && (origin - other.origin).norm() < 1e-12 &&
         std::abs(h - other.h) < 1e-14;
}

Vec3 CartesianGrid::to_index_space(const Vec3& x) const {
  Vec3 s = Vec3::Zero();
  for (int a = 0; a < dim; ++a) s[a] = (x[a] - origin[a]) / h;
  return s;
}

double interpolate(const CartesianGrid& grid, std::span<const double> field, const Vec3& x) {
  const Vec3 s = grid.to_index_space(x);
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
  for (int a = 0; a < grid.dim; ++a) {
    const double clamped = std::clamp(s[a], 0.0, static_cast<double>(grid.size[a] - 1));
    base[a] = std::min(static_cast<int>(std::floor(clamped)), grid.size[a] - 2);
    frac[a] = clamped - base[a];
  }
  const int corners = 1 << grid.dim;
  double value = 0.0;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::array<int, 3> idx = base;
    for (int a = 0; a < grid.dim; ++a) {
      const bool up = (c >> a) & 1;
      w *= up ? frac[a] : 1.0 - frac[a];
      idx[a] += up ? 1 : 0;
    }
    if (w != 0.0) value += w * field[grid.index(idx[0], idx[1], idx[2])];
  }
  return value;
}

Vec3 node_gradient(const CartesianGrid& grid, std::span<const double> field, std::size_t idx) {
  Vec3 g = Vec3::Zero();
  const auto c = grid.coords(idx);
  for (int a = 0; a < grid.dim; ++a) {
    const std::ptrdiff_t s = grid.stride(a);
    if (c[a] == 0) {
      g[a] = (field[idx + s] - field[idx]) / grid.h;
    } else if (c[a] == grid.size[a] - 1) {
      g[a] = (field[idx] - field[idx - s]) / grid.h;
    } else {
      g[a] = (field[idx + s] - field[idx - s]) / (2.0 * grid.h);
    }
  }
  return g;
}

}  // namespace gahf
