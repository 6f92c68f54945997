#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gahf/capillary_solver.hpp"
#include "gahf/spherical_oracle.hpp"
#include "gahf/surface.hpp"

namespace gahf {

/// Nodal level function; `defined` marks nodes whose value may enter
/// difference stencils. The surface of interest is {values = 0} and the
/// outer region Omega' is {values > 0}.
struct LevelField {
  CartesianGrid grid;
  Field values;
  std::vector<char> defined;
};

/// Level-set geometry per node from the unit normal of df; psi = f / |df|_g
/// only enters the degeneracy check.
struct NodalGeometry {
  Field H;       // div_g of the unit normal
  Field T;       // tr_g p - p(nu, nu)
  Field h2;      // |h|_g^2 from the projected Hessian
  Field grad_psi;
  std::vector<char> valid;
};

NodalGeometry nodal_level_geometry(const InitialDataSet& ids, const LevelField& f);

/// H - |T| (generalized) or H + T (mots).
double horizon_defect(double H, double T, HorizonMode mode);

/// u + K on nodes where u is defined; nodes inside the inner parts get a value
/// below every defined one and nodes outside the outer shape get K.
LevelField graph_level_field(const JangOperator& op, const GraphSolution& s, double K = 0.0);

struct HorizonSurface {
  SurfaceMesh mesh;
  std::vector<double> H, T, h2;
  std::vector<char> valid;
  std::vector<int> component;  // per element
  int components = 0;
  double area = 0.0;
  double level = 0.0;  // blow-down threshold K (0 for mask surfaces)
  LevelField field;    // zero set = mesh
  HorizonMode mode = HorizonMode::Generalized;

  std::size_t valid_vertices() const;
};

/// Euclidean distance to `mesh`, negative where `sign_field` is.
Field signed_distance(const CartesianGrid& grid, const SurfaceMesh& mesh, const Field& sign_field);

/// Area under g: element measures with the metric at element centroids.
double area(const SurfaceMesh& mesh, const InitialDataSet& ids);

/// Zero set of `field`, closed and embedded; Extraction error otherwise.
/// Geometry is sampled by surface_geometry.
HorizonSurface extract_surface(const LevelField& field, const InitialDataSet& ids, HorizonMode mode);

/// Interface of a node region (1 = inside) after one smoothing pass of its
/// indicator over the 3^n block. Geometry is only sampled within 6h of it
/// and on `usable` nodes (all when empty).
HorizonSurface extract_region_surface(const CartesianGrid& grid, const std::vector<char>& region,
                                      const InitialDataSet& ids, HorizonMode mode,
                                      const std::vector<char>& usable = {});

/// Surface for an existing closed mesh; the level field is the signed
/// distance to it, negative on enclosed nodes, defined within 6h of the mesh.
HorizonSurface surface_from_mesh(const SurfaceMesh& mesh, const CartesianGrid& grid, const InitialDataSet& ids,
                                 HorizonMode mode);

/// Per-vertex H, T and |h|^2 interpolated from the nodal level geometry.
/// Throws Geometry when |grad psi| < 0.5 next to the surface.
void surface_geometry(HorizonSurface& sigma, const InitialDataSet& ids);

/// sup over valid vertices of |H - |T|| (mots: |H + T|).
double horizon_residual(const HorizonSurface& sigma);

struct LevelScanPoint {
  double K = 0.0;
  double mean_defect = 0.0;  // area mean of the horizon defect on {u = -K}
  bool sampled = false;
};

struct LevelSelection {
  double K = 0.0;
  double mean_defect = 0.0;
  bool sign_change = false;
  bool inner_boundary = false;  // every level set untrapped
  std::vector<LevelScanPoint> scan;
};

/// Threshold K in [K_lo, K_hi] where the area mean of the horizon defect on
/// {u = -K} vanishes: outermost + to - change over a geometric scan refined
/// by bisection. Without a change: K_hi when every mean is positive (the
/// interface is the inner boundary), K_lo when every mean is negative, else
/// the smallest |mean|.
LevelSelection select_horizon_level(const JangOperator& op, const GraphSolution& s, double K_lo, double K_hi,
                                    HorizonMode mode, int scan_points = 24, int bisections = 30);

/// Blow-down interface {u = -K}.
HorizonSurface extract_blow_down_surface(const JangOperator& op, const GraphSolution& s, double K, HorizonMode mode);

/// Flood fill from the outer ghosts through {field >= 0} never reaches an inner ghost.
bool separates_boundaries(const DomainGrid& domain, const LevelField& field);

struct ProbeOptions {
  int trials = 50;
  std::uint64_t seed = 1;
  double max_amplitude = 0.0;      // default 5h
  double tolerance_fraction = 1e-3;
  int global_levels = 8;
};

struct OuterMinimizingReport {
  double area = 0.0;
  double tolerance = 0.0;
  double min_excess = 0.0;         // min over bumps of perturbed area - area
  double global_min_excess = 0.0;  // min over the enclosing sweep
  int trials = 0;
  int failures = 0;
  std::vector<std::uint64_t> failing_seeds;
  bool pass() const { return failures == 0; }
};

/// Outward bumps of amplitude in (0, max_amplitude] along the vertex normals,
/// plus a sweep of level sets {field = c}, 0 < c < K, enclosing the surface.
OuterMinimizingReport outer_minimizing_probe(const HorizonSurface& sigma, const InitialDataSet& ids,
                                             const ProbeOptions& options = {});

struct StabilityReport {
  double kappa2 = 0.0;
  double area = 0.0;
  double margin = 0.0;     // min over trials of the quadratic form
  double tolerance = 0.0;  // 0.05 kappa^2 area
  int trials = 0;
  double constant_margin = 0.0;  // phi = 1
  bool pass() const { return margin >= -tolerance; }
};

/// Random Gaussian-sum test functions (max 1) with P1 quadrature; the first
/// trial is phi = 1.
StabilityReport stability_probe(const HorizonSurface& sigma, const InitialDataSet& ids, double kappa2, int trials = 100,
                                std::uint64_t seed = 7);

enum class Coincidence { Disjoint, Coincident, Anomaly };
std::string to_string(Coincidence c);

struct ComponentContact {
  int component = 0;
  Coincidence flag = Coincidence::Disjoint;
  int boundary_component = -1;  // matched component when coincident
  double hausdorff = 0.0;       // to the closest boundary component
  double clearance = 0.0;       // min distance to every boundary component
};

/// Components of the inner boundary (zero sets of the part distances).
std::vector<SurfaceMesh> inner_boundary_meshes(const DomainGrid& domain);

std::vector<ComponentContact> coincidence_check(const HorizonSurface& sigma, const std::vector<SurfaceMesh>& inner,
                                                double h);

struct VerificationReport {
  double h = 0.0;
  HorizonMode mode = HorizonMode::Generalized;
  double level = 0.0;
  double residual = 0.0;
  double residual_tolerance = 0.0;
  double area = 0.0;
  std::size_t vertices = 0;
  std::size_t valid_vertices = 0;
  int components = 0;
  bool separates = true;
  OuterMinimizingReport outer;
  StabilityReport stability;
  std::vector<ComponentContact> contacts;
  double sup_H = 0.0;  // almost-minimizing check: sup |H(u)| <= 2C
  double C = 0.0;
  bool almost_minimizing_checked = false;

  bool residual_pass() const { return residual <= residual_tolerance; }
  bool almost_minimizing_pass() const { return !almost_minimizing_checked || sup_H <= 2.0 * C; }
  bool pass() const;
  /// key = value lines, each number followed by its tolerance where one applies.
  std::string text() const;
};

struct VerificationOptions {
  ProbeOptions probes;
  int stability_trials = 100;
  std::uint64_t stability_seed = 7;
  double residual_scale = 2.0;  // tolerance = scale * h
};

VerificationReport verify_horizon(const HorizonSurface& sigma, const InitialDataSet& ids, const DomainGrid& domain,
                                  const VerificationOptions& options = {});

}  // namespace gahf
