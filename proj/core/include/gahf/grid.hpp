#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace gahf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Node-indexed scalar field on a CartesianGrid.
using Field = std::vector<double>;

/// Uniform node-centred Cartesian grid in two or three dimensions.
///
/// Two-dimensional grids are stored as 3D grids with a single layer in z; all
/// vectors carry three components and the third one is unused (zero).
struct CartesianGrid {
  int dim = 2;
  std::array<int, 3> size{1, 1, 1};
  Vec3 origin = Vec3::Zero();
  double h = 1.0;

  /// Square/cube grid of `nodes` per axis covering [-half_width, half_width]^dim.
  static CartesianGrid centered(int dim, int nodes, double half_width);

  std::size_t node_count() const {
    return static_cast<std::size_t>(size[0]) * size[1] * size[2];
  }
  std::size_t index(int i, int j, int k = 0) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(size[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(size[1]) * k);
  }
  std::array<int, 3> coords(std::size_t idx) const {
    const int i = static_cast<int>(idx % size[0]);
    const std::size_t rest = idx / size[0];
    return {i, static_cast<int>(rest % size[1]), static_cast<int>(rest / size[1])};
  }
  std::ptrdiff_t stride(int axis) const {
    if (axis == 0) return 1;
    if (axis == 1) return size[0];
    return static_cast<std::ptrdiff_t>(size[0]) * size[1];
  }
  Vec3 position(std::size_t idx) const {
    const auto c = coords(idx);
    Vec3 x = origin;
    for (int a = 0; a < dim; ++a) x[a] += h * c[a];
    return x;
  }
  /// True when the node has neighbours in every active direction.
  bool is_inner_index(std::size_t idx) const;
  bool same_shape(const CartesianGrid& other) const;

  /// Continuous index coordinates of a point (no clamping).
  Vec3 to_index_space(const Vec3& x) const;
};

/// Multilinear interpolation of `field` at `x`; points outside the grid are
/// clamped to the nearest cell.
double interpolate(const CartesianGrid& grid, std::span<const double> field, const Vec3& x);

/// Centred-difference gradient of `field` at node `idx` (one-sided on the box edge).
Vec3 node_gradient(const CartesianGrid& grid, std::span<const double> field, std::size_t idx);

}  // namespace gahf
