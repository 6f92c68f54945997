#pragma once

#include <vector>

#include "gahf/domain.hpp"
#include "gahf/jang_operator.hpp"
#include "gahf/spherical_oracle.hpp"

namespace gahf {

/// Boundary mean-curvature margins with the domain's orientation
/// (d1 normal out of Omega, d2 normal into Omega).
struct AdmissibilityReport {
  double outer_margin = 0.0;  // min H - |tr p|_eps on d1   (mots: H + tr p_eps)
  double inner_margin = 0.0;  // min |tr p|_eps - H on d2   (mots: -(H + tr p_eps))
  Vec3 worst_outer = Vec3::Zero();
  Vec3 worst_inner = Vec3::Zero();
  bool outer_pass = false;
  bool inner_pass = false;
  bool pass() const { return outer_pass && inner_pass; }
};

/// Samples both boundaries; throws Admissibility with the worst point when
/// `throw_on_fail` is set and a margin is not positive.
AdmissibilityReport boundary_admissibility(const DomainGrid& domain, const InitialDataSet& ids, double eps,
                                           HorizonMode mode = HorizonMode::Generalized, bool throw_on_fail = true);

/// Margin |tr p|_eps - H - 2 delta on the distance surface {d = gamma} of one
/// inner part (mots: -(H + tr p_eps) - 2 delta).
double distance_surface_margin(const DomainGrid& domain, const InitialDataSet& ids, std::size_t part,
                               double gamma, double delta, double eps, HorizonMode mode);

struct DeltaChoice {
  double delta = 0.0;                 // min over parts
  std::vector<double> part_delta;     // per inner part
  std::vector<char> marginal;         // part accepted without a strict margin
};

struct DeltaOptions {
  HorizonMode mode = HorizonMode::Generalized;
  int gamma_samples = 10;
  int refine_steps = 8;
  /// Parts that fail the strict test fall back to delta = 2h instead of
  /// raising (used for seeds bounded by computed horizons).
  bool allow_marginal = false;
};

/// Largest admissible delta per part (dyadic descent from separation/4, then
/// bisection). Throws Barrier when some part admits no delta >= 2h.
DeltaChoice choose_delta(const DomainGrid& domain, const InitialDataSet& ids, double eps,
                         const DeltaOptions& options = {});

struct BarrierCheck {
  double super_residual_max = 0.0;  // want <= tolerance
  double sub_residual_min = 0.0;    // want >= -tolerance
  double tolerance = 0.0;
  std::size_t super_nodes = 0;
  std::size_t sub_nodes = 0;
  bool pass() const { return super_residual_max <= tolerance && sub_residual_min >= -tolerance; }
};

struct BarrierPair {
  Field upper;  // super solution, every grid node
  Field lower;  // sub solution, every grid node
  double delta = 0.0;
  std::vector<double> part_delta;
  double theta = 0.0;
  double t = 0.0;
  double eps = 0.0;
  double C = 1.0;
  BarrierCheck check;
};

/// C = 1 + n |p|_C0 (|p_eps| <= |p| + eps in mots mode).
double barrier_constant(const DomainGrid& domain, double eps, HorizonMode mode);

/// Builds both barriers, verifies lower <= upper and the discrete residual
/// signs away from kinks (tolerance 10h). Throws Barrier when the check fails.
BarrierPair build_barriers(const JangOperator& op, double t, double eps, const DeltaChoice& delta,
                           bool throw_on_fail = true);

/// Largest t in [t_lo, t_hi] passing build_barriers' check (20 bisection steps).
/// Throws Barrier when t_lo already fails.
double max_admissible_t(const JangOperator& op, double t_lo, double t_hi, double eps, const DeltaChoice& delta);

/// Inner ghost datum: the super solution's value there (min over parts of -delta_k/t
/// clamped at the boundary).
Field inner_boundary_datum(const DomainGrid& domain, const BarrierPair& barriers);

/// MOTS cutoff: 0 near d1, 1 beyond `hi_fraction` of the boundary separation.
Field mots_cutoff(const DomainGrid& domain, double lo_fraction = 0.2, double hi_fraction = 0.45);

}  // namespace gahf
