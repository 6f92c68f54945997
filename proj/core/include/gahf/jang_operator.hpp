#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/SparseCore>

#include "gahf/domain.hpp"
#include "gahf/initial_data.hpp"

namespace gahf {

enum class OperatorMode {
  Generalized,  // H(u) - |tr(p)|_eps(u) - t u
  Mots,         // H(u) + tr(p - eps phi g)(u) - t u
};

/// Graph function u on every grid node. Ghost values are derived from their
/// anchors and the boundary datum by JangOperator::fill_ghosts.
struct GraphSolution {
  Field u;
  Field boundary;  // datum b at ghost nodes (0 on d1)
  double t = 0.0;
  double eps = 0.01;
};

struct ResidualField {
  Field values;  // interior nodes only, zero elsewhere
  double sup = 0.0;
};

/// Pointwise quantities of graph(u) at one node.
struct GraphPoint {
  Vec3 du = Vec3::Zero();  // coordinate gradient
  double v = 1.0;          // sqrt(1 + |Du|_g^2)
  double trace = 0.0;      // tr(p)(u), or tr(p_eps)(u) in MOTS mode
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Discrete capillary Jang operator on a DomainGrid.
///
/// H(u) uses the conservative form (1/sqrt g) d_i(sqrt g g^ij u_j / v) with
/// face fluxes; the normal derivative on a face is a two-point difference and
/// tangential derivatives are averaged centred differences.
class JangOperator {
 public:
  /// `cutoff` is the MOTS function phi per node (ignored in generalized mode).
  JangOperator(const InitialDataSet& ids, const DomainGrid& domain,
               OperatorMode mode = OperatorMode::Generalized, Field cutoff = {});

  const DomainGrid& domain() const { return *domain_; }
  const InitialDataSet& data() const { return ids_; }
  OperatorMode mode() const { return mode_; }
  int dim() const { return domain_->dim(); }

  std::size_t dof_count() const { return domain_->interior.size(); }
  /// Interior index of node `n`, or -1.
  std::int64_t dof(std::size_t n) const { return dof_[n]; }

  void fill_ghosts(GraphSolution& s) const;
  /// Set the ghost datum on d1 (value 0) and d2 (value `inner`).
  void set_boundary(GraphSolution& s, const Field& inner) const;

  GraphPoint point(const Field& u, std::size_t n, double eps) const;
  double mean_curvature(const Field& u, std::size_t n) const;
  double residual_at(const GraphSolution& s, std::size_t n) const;

  ResidualField residual(const GraphSolution& s) const;
  /// Jacobian d residual / d u over interior nodes (ghost columns folded
  /// onto their anchors).
  SparseMatrix linearize(const GraphSolution& s) const;

  const Mat3& inverse_metric(std::size_t n) const;
  const Mat3& tensor(std::size_t n) const;
  double volume_factor(std::size_t n) const;
  double cutoff(std::size_t n) const;

 private:
  struct NodeData {
    Mat3 ginv;
    Mat3 p;
    double sqrtg = 1.0;
    double phi = 0.0;
  };
  struct FaceData {
    Mat3 s = Mat3::Zero();  // sqrt(g) g^-1 at the face midpoint
    double sqrtg = 1.0;
    bool valid = false;
  };
  struct FaceStencil {
    std::size_t node[10];
    Vec3 weight[10];
    int count = 0;
  };

  std::int64_t slot(std::size_t n) const;
  void check_interior(std::size_t n) const;
  FaceStencil face_stencil(std::size_t n, int axis) const;
  Vec3 face_gradient(const Field& u, std::size_t n, int axis) const;
  double face_flux(const Field& u, std::size_t n, int axis) const;

  InitialDataSet ids_;
  const DomainGrid* domain_;
  OperatorMode mode_;
  std::vector<std::int64_t> dof_;
  std::vector<std::int64_t> slot_;
  std::vector<NodeData> nodes_;
  std::vector<FaceData> faces_;  // 3 per slot, towards +axis
  std::vector<std::int64_t> ghost_;  // index into domain.ghosts per node, or -1
};

/// H(u) per interior node.
Field graph_mean_curvature(const JangOperator& op, const GraphSolution& s);
/// tr(p)(u) per interior node (tr(p_eps)(u) in MOTS mode).
Field graph_trace_p(const JangOperator& op, const GraphSolution& s);
/// sqrt(tr(p)(u)^2 + eps^2) per interior node; eps <= 0 is a parameter error.
Field regularized_trace(const JangOperator& op, const GraphSolution& s, double eps);
ResidualField residual(const JangOperator& op, const GraphSolution& s);
SparseMatrix linearize(const JangOperator& op, const GraphSolution& s);

/// Explicit curvature bound kappa^2 = n sup|Ric| + 8n(sup|p|^2 + sup|dp|) + 1.
double kappa_squared(const DataNorms& norms, int dim);

struct DefectField {
  Field values;                // LHS - RHS where evaluated
  std::vector<char> evaluated; // nodes with a complete stencil
  double max_positive = 0.0;
};

/// (1 - 1/(3(n-1))) |h|^2/v + Lap_G(1/v) - kappa^2/v per interior node.
DefectField stretch_subharmonic_defect(const JangOperator& op, const GraphSolution& s, double kappa2);

/// Squared norm of the second fundamental form of graph(u) at node `n`.
double graph_second_fundamental_form(const JangOperator& op, const Field& u, std::size_t n);

/// Terms of the stability quadratic form on graph(u) for a test function phi
/// given per node: integrals of |grad phi|^2, phi^2 and |h|^2 phi^2 over the graph.
struct StabilityTerms {
  double gradient = 0.0;
  double mass = 0.0;
  double curvature = 0.0;
  double margin(double kappa2, int dim) const {
    return gradient + kappa2 * mass - (1.0 - 1.0 / (3.0 * (dim - 1))) * curvature;
  }
};
StabilityTerms graph_stability_terms(const JangOperator& op, const GraphSolution& s, const Field& phi);

}  // namespace gahf
