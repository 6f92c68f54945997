#pragma once

#include <array>
#include <vector>

#include "gahf/grid.hpp"

namespace gahf {

/// Closed polyline set (dim 2, elements use the first two indices) or
/// triangle mesh (dim 3). Element orientation puts {f > 0} on the side of
/// the normal: right of the segment direction in 2D, right-handed in 3D.
struct SurfaceMesh {
  int dim = 2;
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> elements;

  std::size_t element_size() const { return dim == 2 ? 2 : 3; }
  bool empty() const { return elements.empty(); }
  /// Euclidean normal of an element (length = Euclidean measure).
  Vec3 element_normal(std::size_t e) const;
  Vec3 centroid(std::size_t e) const;
};

/// Zero set of `f` sampled on `grid`. Marching squares (cell-centre value
/// resolves saddles) in 2D, marching tetrahedra on the six-tetrahedron
/// Kuhn split of each cell in 3D. Values within 1e-4 h of zero count as 1e-4 h.
SurfaceMesh extract_isosurface(const CartesianGrid& grid, const Field& f);

/// Edges (3D) or vertices (2D) not shared by exactly two elements.
std::size_t boundary_defects(const SurfaceMesh& mesh);

/// Connected component label per element; returns the component count.
int label_components(const SurfaceMesh& mesh, std::vector<int>& element_component);

/// Sub-mesh made of the elements with the given component label.
SurfaceMesh component_mesh(const SurfaceMesh& mesh, const std::vector<int>& element_component, int label);

/// Number of intersecting pairs of non-adjacent elements.
std::size_t self_intersections(const SurfaceMesh& mesh);

/// Euclidean distance from a point to the mesh.
class MeshDistance {
 public:
  explicit MeshDistance(const SurfaceMesh& mesh);
  double operator()(const Vec3& x) const;

 private:
  double element_distance(std::size_t e, const Vec3& x) const;
  const SurfaceMesh& mesh_;
  Vec3 lo_ = Vec3::Zero();
  double cell_ = 1.0;
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<std::vector<int>> buckets_;
};

/// Nodes enclosed by a closed mesh (ray parity along the first axis).
std::vector<char> enclosed_nodes(const CartesianGrid& grid, const SurfaceMesh& mesh);

/// Symmetric Hausdorff distance (vertex samples against elements).
double hausdorff_distance(const SurfaceMesh& a, const SurfaceMesh& b);
/// Smallest vertex-to-mesh distance in either direction.
double min_distance(const SurfaceMesh& a, const SurfaceMesh& b);

}  // namespace gahf
