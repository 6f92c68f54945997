#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gahf/initial_data.hpp"

namespace gahf {

enum class HorizonMode { Generalized, Mots };

std::string to_string(HorizonMode mode);
HorizonMode parse_horizon_mode(const std::string& text);

/// Coordinate-sphere quantities of a spherically symmetric family
/// (single source; r is measured from its centre).
struct RadialScalars {
  double H = 0.0;  // mean curvature, outward normal
  double T = 0.0;  // tr_S p
};

/// Throws Domain for r <= 0 and for families without spherical symmetry.
RadialScalars radial_scalars(const AnalyticFamily& family, int dim, double r);

/// Conformal length factor A(r) with g = A^2 delta, and A'(r)/A(r).
double radial_length_factor(const AnalyticFamily& family, double r);
double radial_length_log_slope(const AnalyticFamily& family, double r);

/// tr(p)(u) for a radial graph whose unit-normal radial component is w.
double radial_graph_trace(const AnalyticFamily& family, int dim, double r, double w);

/// Outermost root of H - |T| (generalized) or H + T (mots) in [r_lo, r_hi],
/// bisected to 1e-12; nullopt when there is no sign change.
std::optional<double> horizon_radius(const AnalyticFamily& family, int dim, HorizonMode mode,
                                     double r_lo = 0.0, double r_hi = 0.0);

enum class RadialInnerCondition { Dirichlet, Neumann };

struct RadialProblem {
  double t = 0.1;
  double eps = 0.01;
  double r_in = 1.0;
  double r_out = 6.0;
  RadialInnerCondition inner = RadialInnerCondition::Dirichlet;
  double inner_value = 0.0;  // u(r_in) for Dirichlet
  HorizonMode mode = HorizonMode::Generalized;
  std::function<double(double)> cutoff;  // MOTS phi(r); defaults to 1
};

/// Radial solution sampled at the integrator's accepted steps.
struct RadialSolution {
  std::vector<double> r, u, w;
  double shooting_parameter = 0.0;

  /// Cubic Hermite interpolation of u.
  double value(double x, const AnalyticFamily& family) const;
};

/// Solves (H - |tr p|_eps - t u)(u) = 0 (or the MOTS analogue) for radial u
/// with u(r_out) = 0 by shooting; adaptive Dormand-Prince, local error 1e-10.
/// Throws Oracle when the shooting bracket has no sign change.
RadialSolution radial_capillary_solve(const AnalyticFamily& family, int dim, const RadialProblem& problem);

/// CSV table "r,H,T" with `count` uniformly spaced radii.
std::string oracle_table(const AnalyticFamily& family, int dim, double r_lo, double r_hi, int count);

}  // namespace gahf
