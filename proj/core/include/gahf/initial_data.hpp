#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gahf/grid.hpp"

namespace gahf {

/// Point evaluation of an initial data set (g, p) and first derivatives.
/// Two-dimensional data is padded: g(2,2) = 1, every other z entry is zero.
struct DataSample {
  Mat3 g = Mat3::Identity();
  std::array<Mat3, 3> dg{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};  // dg[k] = d_k g
  Mat3 p = Mat3::Zero();
  std::array<Mat3, 3> dp{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};  // dp[k] = d_k p
};

/// Axis-aligned box on which a data set is declared.
struct Box {
  Vec3 lo = Vec3::Constant(-1.0);
  Vec3 hi = Vec3::Constant(1.0);

  bool contains(const Vec3& x, int dim, double slack = 1e-12) const;
};

class DataSource {
 public:
  virtual ~DataSource() = default;
  /// Raw evaluation; may throw ErrorKind::Domain at singular points.
  virtual DataSample sample(const Vec3& x) const = 0;
};

enum class FamilyTag {
  Flat,
  IsotropicSchwarzschild,
  PainleveGullstrand,
  BrillLindquist,
  ConformallyFlatCustom,
};

struct PointMass {
  double mass = 1.0;
  Vec3 center = Vec3::Zero();
};

/// Closed-form test data. Masses are in units of length.
///
/// Painleve-Gullstrand data uses the ingoing slicing: on a flat metric
///   p_ij = p_sign * sqrt(2m/r^3) * (delta_ij - 3/2 x_i x_j / r^2),  p_sign = -1,
/// so the sphere r = 2m satisfies both H + tr_S p = 0 and H = |tr_S p|.
/// Several sources superpose their tensors (used for two-centre 2D tests).
struct AnalyticFamily {
  FamilyTag tag = FamilyTag::Flat;
  std::vector<PointMass> sources;
  double p_sign = -1.0;
  /// Conformal factor and gradient for ConformallyFlatCustom (g = psi^4 delta).
  std::function<double(const Vec3&)> psi;
  std::function<Vec3(const Vec3&)> grad_psi;

  static AnalyticFamily flat();
  static AnalyticFamily isotropic_schwarzschild(double mass);
  static AnalyticFamily painleve_gullstrand(double mass);
  static AnalyticFamily painleve_gullstrand(std::vector<PointMass> sources);
  /// Two punctures on the x axis at +-separation/2.
  static AnalyticFamily brill_lindquist(double m1, double m2, double separation);
  static AnalyticFamily conformally_flat(std::function<double(const Vec3&)> psi,
                                         std::function<Vec3(const Vec3&)> grad_psi);

  /// Throws ErrorKind::Parameter for non-positive masses or separation.
  void validate() const;
  std::string name() const;
};

std::shared_ptr<const DataSource> make_source(const AnalyticFamily& family, int dim);

/// Immutable handle to (g, p) on a declared box. Copies share the source.
class InitialDataSet {
 public:
  InitialDataSet(int dim, std::shared_ptr<const DataSource> source, Box bounds,
                 std::string description);

  static InitialDataSet from_family(const AnalyticFamily& family, int dim, const Box& bounds);

  int dimension() const { return dim_; }
  const Box& bounds() const { return bounds_; }
  const std::string& description() const { return description_; }

  /// Checked evaluation. Domain error outside the box, data error when the
  /// metric is not symmetric positive definite or p is not symmetric.
  DataSample evaluate(const Vec3& x) const;

 private:
  int dim_;
  std::shared_ptr<const DataSource> source_;
  Box bounds_;
  std::string description_;
};

/// Sup norms of p over a sample set (the closure of a computational domain).
struct DataNorms {
  double p_c0 = 0.0;   // max |g^{-1} p| eigenvalue magnitude
  double dp_c0 = 0.0;  // max |d_k p_ij|
  double ric_c0 = 0.0; // max |Ric|_g
};

/// gamma[k](i, j) = Gamma^k_ij of the metric in `s`.
using Christoffel = std::array<Mat3, 3>;
Christoffel christoffel(const DataSample& s, int dim);

/// Largest eigenvalue magnitude of p relative to g.
double tensor_norm(const Mat3& g, const Mat3& p, int dim);

// IDSGRID1 -----------------------------------------------------------------

/// Parse an IDSGRID1 file (see README for the layout). Throws ErrorKind::Parse
/// with the offending line on malformed input.
InitialDataSet load_grid_file(const std::string& path);
InitialDataSet parse_grid_text(const std::string& text, const std::string& origin_name = "<text>");

/// Write `ids` sampled on `grid` in IDSGRID1 packed layout.
std::string write_grid_text(const InitialDataSet& ids, const CartesianGrid& grid);

}  // namespace gahf
