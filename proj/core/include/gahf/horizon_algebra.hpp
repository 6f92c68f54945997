#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gahf/horizon_geometry.hpp"

namespace gahf {

/// Open set Omega' of the base domain bounded by d1 and a trapped surface.
struct TrappedDomain {
  std::vector<char> mask;  // interior and d1 ghost nodes of the base domain inside Omega'
  LevelField level;        // signed distance to the trapped surface, > 0 in Omega'
  std::optional<HorizonSurface> surface;
  std::string label;
};

/// Seed from a closed region given as a shape (sdf < 0 inside the trapped region);
/// data is only evaluated within 6h of its boundary and at most 3h inside d2.
TrappedDomain trapped_domain_from_shape(const DomainGrid& base, const InitialDataSet& ids, const Shape& region,
                                        HorizonMode mode, std::string label = "shape");
/// Seed from a node mask (1 = trapped region).
TrappedDomain trapped_domain_from_mask(const DomainGrid& base, const InitialDataSet& ids,
                                       const std::vector<char>& region, HorizonMode mode,
                                       std::string label = "mask");
/// Outer region of a computed horizon.
TrappedDomain trapped_domain_from_horizon(const DomainGrid& base, const HorizonSurface& sigma,
                                          std::string label = "horizon");

/// Nodes inside the trapped region (complement of the mask within the outer shape).
std::vector<char> trapped_region(const DomainGrid& base, const TrappedDomain& a);

struct FinderOptions {
  ContinuationSchedule schedule = ContinuationSchedule::halving(0.2, 0.0125, 0.04, 0.01);
  HorizonMode mode = HorizonMode::Generalized;
  /// Seeds bounded by computed horizons are only marginally trapped.
  bool allow_marginal_inner = false;
  int level_scan_points = 24;
  int level_bisections = 30;
  bool keep_history = false;  // keep every accepted step's solution
};

/// mots_mode: the same options with the operator H + tr(p - eps phi g) - t u.
FinderOptions mots_mode(FinderOptions options);

struct HorizonRun {
  DomainGrid domain;
  DeltaChoice delta;
  AdmissibilityReport admissibility;
  SolveTrace trace;
  GraphSolution solution;
  std::vector<GraphSolution> history;
  BarrierPair barriers;
  LevelSelection level;
  HorizonSurface surface;
};

/// Full pipeline on one domain: barriers, continuation, level selection and extraction.
/// Throws Admissibility when d1 (or d2 unless marginal seeds are allowed) fails.
HorizonRun find_horizon(const InitialDataSet& ids, const DomainGrid& domain, const FinderOptions& options);

/// Domain with outer boundary d1 of `base` and inner boundary the boundary of
/// the union of both trapped regions. Geometry error when nothing is left.
DomainGrid intersect_domains(const InitialDataSet& ids, const DomainGrid& base, const TrappedDomain& a,
                             const TrappedDomain& b);

struct EnclosingResult {
  HorizonRun run;
  TrappedDomain domain;
  bool enclosure_ok = false;  // new mask is a subset of both input masks
  double clearance_a = 0.0;   // min distance from the new surface to the input surfaces
  double clearance_b = 0.0;
};

/// Horizon enclosing both trapped regions: the pipeline on intersect_domains
/// with the minimum of the per-part super solutions.
EnclosingResult enclosing_horizon(const InitialDataSet& ids, const DomainGrid& base, const TrappedDomain& a,
                                  const TrappedDomain& b, const FinderOptions& options);

struct OutermostRound {
  std::string operation;
  double hausdorff = 0.0;  // to the previous round's surface (infinite for the first)
  bool subset = false;     // mask contained in the previous round's mask
  double area = 0.0;
  double level = 0.0;
};

struct OutermostResult {
  EnclosingResult final;
  std::vector<OutermostRound> rounds;
  bool converged = false;
  bool monotone_masks = true;
  bool monotone_distances = true;
};

/// Folds the seeds with enclosing_horizon, then re-solves on the last domain
/// until consecutive surfaces are closer than h/2. Usage error for an empty
/// seed list; Iteration error after `max_rounds` without convergence.
OutermostResult outermost(const InitialDataSet& ids, const DomainGrid& base, const std::vector<TrappedDomain>& seeds,
                          const FinderOptions& options, int max_rounds = 6);

/// Node-mask subset test a ⊆ b.
bool mask_subset(const std::vector<char>& a, const std::vector<char>& b);

}  // namespace gahf
