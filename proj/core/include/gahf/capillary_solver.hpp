#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gahf/barriers.hpp"
#include "gahf/error.hpp"
#include "gahf/jang_operator.hpp"

namespace gahf {

struct ContinuationSchedule {
  std::vector<double> t_values;    // strictly decreasing
  std::vector<double> eps_values;  // strictly decreasing; eps_values[0] is used during the t sweep
  double newton_tol = 1e-8;
  int max_newton = 80;
  double krylov_tol = 1e-10;
  double blow_down_factor = 0.5;  // K = factor * theta / t
  /// Stop the t sweep once consecutive blow-down interfaces move less than h/2.
  bool stop_on_stall = false;

  /// Halving sequences t0, t0/2, ... >= t_min and eps0, eps0/2, ... >= eps_min
  /// (the floors are appended when they are not hit exactly).
  static ContinuationSchedule halving(double t0, double t_min, double eps0, double eps_min);
  /// Throws Parameter when an invariant fails.
  void validate() const;
};

struct SolveStep {
  double t = 0.0;
  double eps = 0.0;
  int newton_iterations = 0;
  int linear_iterations = 0;
  double residual_sup = 0.0;
  double min_u = 0.0;
  double sup_H = 0.0;
  double C = 1.0;
  double delta = 0.0;
  double theta = 0.0;
  std::size_t active_nodes = 0;
  std::size_t envelope_violations = 0;  // lower <= u <= upper
  std::size_t bound_violations = 0;     // 0 >= u >= -C/t
  std::size_t inner_collar_violations = 0;  // u <= -theta/t where d2 <= theta
  std::size_t outer_collar_violations = 0;  // u >= ln(1 - d1/theta) where d1 < theta
  std::size_t curvature_violations = 0;     // |H(u)| <= 2C
  bool warm_start = false;
  double seconds = 0.0;

  std::size_t violations() const {
    return envelope_violations + bound_violations + inner_collar_violations + outer_collar_violations +
           curvature_violations;
  }
};

struct SolveTrace {
  std::vector<SolveStep> steps;
  bool complete = false;
  std::string failure;  // set when a solve aborted the sweep

  /// Whitespace-aligned text table, one row per step.
  std::string table() const;
};

/// Solver failure carrying the partial trace.
class SolverError : public Error {
 public:
  SolverError(ErrorKind kind, const std::string& what, SolveTrace trace)
      : Error(kind, what), trace_(std::move(trace)) {}
  const SolveTrace& trace() const { return trace_; }

 private:
  SolveTrace trace_;
};

struct FixedSolve {
  GraphSolution solution;
  SolveStep step;
};

/// Projected Newton for the capillary problem between the barriers. The inner
/// ghost datum is the super solution's boundary trace; d1 ghosts carry 0.
FixedSolve solve_fixed(const JangOperator& op, const BarrierPair& barriers, const ContinuationSchedule& schedule,
                       const GraphSolution* warm_start = nullptr);

/// Diagnostics of an accepted solution against the barrier and curvature bounds.
void record_diagnostics(const JangOperator& op, const BarrierPair& barriers, const GraphSolution& s, SolveStep& step);

struct Continuation {
  std::vector<GraphSolution> solutions;  // one per step, t sweep then eps sweep
  std::vector<BarrierPair> barriers;
  SolveTrace trace;
};

using StallTest = std::function<bool(const GraphSolution& previous, const GraphSolution& current)>;

/// t sweep at eps_values[0], then eps sweep at the last t, warm starting each step.
Continuation continue_in_t(const JangOperator& op, const ContinuationSchedule& schedule, const DeltaChoice& delta,
                           const StallTest& stalled = {});

/// Nodes (interior and inner ghost) with u < -K.
std::vector<char> blow_down_region(const JangOperator& op, const GraphSolution& s, double K);

/// Default threshold theta / (2t) scaled by the schedule factor.
double default_blow_down_level(const BarrierPair& barriers, double factor = 0.5);

}  // namespace gahf
