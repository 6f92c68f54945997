#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gahf/grid.hpp"
#include "gahf/initial_data.hpp"

namespace gahf {

/// Level-set description of a closed region; sdf() < 0 inside.
struct Shape {
  enum class Kind { Sphere, Ellipsoid, Union, Sampled };

  Kind kind = Kind::Sphere;
  Vec3 center = Vec3::Zero();
  Vec3 radii = Vec3::Ones();  // sphere uses radii[0]
  std::vector<Shape> children;
  /// Sampled signed distance (negative inside) on `sampled_grid`.
  std::shared_ptr<const Field> sampled;
  CartesianGrid sampled_grid;

  static Shape sphere(double radius, const Vec3& center = Vec3::Zero());
  static Shape ellipsoid(const Vec3& radii, const Vec3& center = Vec3::Zero());
  static Shape union_of(std::vector<Shape> parts);
  static Shape sampled_field(const CartesianGrid& grid, Field sdf);

  /// Signed distance (exact for spheres and their unions, first-order
  /// normalised level function for ellipsoids).
  double sdf(const Vec3& x, int dim) const;
  Box bounding_box(int dim) const;
};

enum class NodeKind : unsigned char { Exterior, Interior, OuterGhost, InnerGhost };

/// Ghost closure: u_ghost = b + rho * (u_anchor - b) where b is the boundary datum.
struct GhostLink {
  std::size_t node = 0;
  std::size_t anchor = 0;
  double rho = 0.0;
};

/// Uniform-grid discretization of a bounded domain
///   Omega = {phi_outer < 0} cap {phi_inner > 0}
/// with outer boundary d1 (normal pointing out of Omega) and inner boundary d2
/// (normal pointing into Omega).
struct DomainGrid {
  CartesianGrid grid;
  Field phi_outer;                // < 0 inside the outer shape
  Field phi_inner;                // > 0 in Omega (outside every inner part)
  std::vector<Field> inner_parts; // per-part signed distance, > 0 outside the part
  std::vector<NodeKind> kind;
  std::vector<GhostLink> ghosts;
  std::vector<std::size_t> interior;  // interior node indices, ascending
  DataNorms norms;                    // sup norms over interior and ghost nodes
  Shape outer_shape;
  std::vector<Shape> inner_shapes;
  std::string orientation = "d1 normal points out of Omega; d2 normal points into Omega";
  int inner_components = 0;

  int dim() const { return grid.dim; }
  double h() const { return grid.h; }
  bool is_interior(std::size_t n) const { return kind[n] == NodeKind::Interior; }
  /// Distance to d1 (>= 0 inside Omega).
  double dist_outer(std::size_t n) const { return -phi_outer[n]; }
  /// Distance to d2 (>= 0 inside Omega).
  double dist_inner(std::size_t n) const { return phi_inner[n]; }
  /// Minimum distance between d1 and d2 measured on the grid.
  double boundary_separation() const;
};

/// Grid covering the outer shape's bounding box with a three-cell margin.
CartesianGrid grid_for(const Shape& outer, int dim, double h);

DomainGrid build_domain(const InitialDataSet& ids, const Shape& outer, const Shape& inner, double h);
DomainGrid build_domain(const InitialDataSet& ids, const Shape& outer, const Shape& inner,
                        const CartesianGrid& grid);
/// Domain with several inner parts (each given by a sampled or analytic shape).
DomainGrid build_domain(const InitialDataSet& ids, const Shape& outer,
                        const std::vector<Shape>& inner_parts, const CartesianGrid& grid);

/// Number of face-connected components of `mask`.
int count_components(const CartesianGrid& grid, const std::vector<char>& mask);

/// Sup norms of p, dp and Ric over interior and ghost nodes.
DataNorms compute_norms(const InitialDataSet& ids, const DomainGrid& domain);

}  // namespace gahf
