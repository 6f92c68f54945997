#include "gahf/jang_operator.hpp"

#include <cmath>
#include <sstream>

#include "gahf/error.hpp"

namespace gahf {

JangOperator::JangOperator(const InitialDataSet& ids, const DomainGrid& domain, OperatorMode mode,
                           Field cutoff)
    : ids_(ids), domain_(&domain), mode_(mode) {
  const CartesianGrid& grid = domain.grid;
  const std::size_t count = grid.node_count();
  if (ids.dimension() != grid.dim) fail(ErrorKind::Geometry, "operator: data and grid dimension differ");
  if (!cutoff.empty() && cutoff.size() != count) fail(ErrorKind::Parameter, "operator: cutoff size mismatch");

  dof_.assign(count, -1);
  for (std::size_t i = 0; i < domain.interior.size(); ++i) dof_[domain.interior[i]] = static_cast<std::int64_t>(i);
  ghost_.assign(count, -1);
  for (std::size_t i = 0; i < domain.ghosts.size(); ++i) ghost_[domain.ghosts[i].node] = static_cast<std::int64_t>(i);

  slot_.assign(count, -1);
  for (std::size_t n = 0; n < count; ++n) {
    if (domain.kind[n] == NodeKind::Exterior) continue;
    slot_[n] = static_cast<std::int64_t>(nodes_.size());
    DataSample s;
    try {
      s = ids.evaluate(grid.position(n));
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "operator: data unavailable at node " << n << ": " << e.what();
      fail(e.kind(), msg.str());
    }
    NodeData d;
    d.ginv = s.g.inverse();
    d.p = s.p;
    d.sqrtg = std::sqrt(s.g.topLeftCorner(grid.dim, grid.dim).determinant());
    d.phi = cutoff.empty() ? 0.0 : cutoff[n];
    nodes_.push_back(d);
  }

  faces_.assign(3 * nodes_.size(), FaceData{});
  for (std::size_t n = 0; n < count; ++n) {
    if (slot_[n] < 0) continue;
    const auto c = grid.coords(n);
    for (int a = 0; a < grid.dim; ++a) {
      if (c[a] + 1 >= grid.size[a]) continue;
      const std::size_t m = n + grid.stride(a);
      if (slot_[m] < 0) continue;
      if (domain.kind[n] != NodeKind::Interior && domain.kind[m] != NodeKind::Interior) continue;
      const DataSample s = ids.evaluate(0.5 * (grid.position(n) + grid.position(m)));
      FaceData& f = faces_[3 * slot_[n] + a];
      f.sqrtg = std::sqrt(s.g.topLeftCorner(grid.dim, grid.dim).determinant());
      f.s = f.sqrtg * s.g.inverse();
      f.valid = true;
    }
  }
}

std::int64_t JangOperator::slot(std::size_t n) const {
  const std::int64_t k = slot_[n];
  if (k < 0) {
    std::ostringstream msg;
    msg << "stencil reaches exterior node " << n;
    fail(ErrorKind::Masking, msg.str());
  }
  return k;
}

void JangOperator::check_interior(std::size_t n) const {
  if (n >= dof_.size() || dof_[n] < 0) {
    std::ostringstream msg;
    msg << "node " << n << " is not an interior node";
    fail(ErrorKind::Masking, msg.str());
  }
}

const Mat3& JangOperator::inverse_metric(std::size_t n) const { return nodes_[slot(n)].ginv; }
const Mat3& JangOperator::tensor(std::size_t n) const { return nodes_[slot(n)].p; }
double JangOperator::volume_factor(std::size_t n) const { return nodes_[slot(n)].sqrtg; }
double JangOperator::cutoff(std::size_t n) const { return nodes_[slot(n)].phi; }

void JangOperator::fill_ghosts(GraphSolution& s) const {
  for (const GhostLink& gl : domain_->ghosts) {
    const double b = s.boundary.empty() ? 0.0 : s.boundary[gl.node];
    s.u[gl.node] = b + gl.rho * (s.u[gl.anchor] - b);
  }
}

void JangOperator::set_boundary(GraphSolution& s, const Field& inner) const {
  s.boundary.assign(domain_->grid.node_count(), 0.0);
  for (const GhostLink& gl : domain_->ghosts)
    if (domain_->kind[gl.node] == NodeKind::InnerGhost) s.boundary[gl.node] = inner[gl.node];
}

GraphPoint JangOperator::point(const Field& u, std::size_t n, double eps) const {
  const CartesianGrid& grid = domain_->grid;
  const NodeData& d = nodes_[slot(n)];
  GraphPoint gp;
  for (int a = 0; a < grid.dim; ++a) {
    const std::size_t up = n + grid.stride(a), dn = n - grid.stride(a);
    slot(up);
    slot(dn);
    gp.du[a] = (u[up] - u[dn]) / (2.0 * grid.h);
  }
  const Vec3 y = d.ginv * gp.du;
  const double v2 = 1.0 + gp.du.dot(y);
  gp.v = std::sqrt(v2);
  gp.trace = (d.ginv * d.p).trace() - y.dot(d.p * y) / v2;
  if (mode_ == OperatorMode::Mots) gp.trace -= eps * d.phi * (grid.dim - 1 + 1.0 / v2);
  return gp;
}

JangOperator::FaceStencil JangOperator::face_stencil(std::size_t n, int a) const {
  const CartesianGrid& grid = domain_->grid;
  const double h = grid.h;
  FaceStencil st;
  const std::size_t m = n + grid.stride(a);
  Vec3 e = Vec3::Zero();
  e[a] = 1.0 / h;
  st.node[st.count] = m;
  st.weight[st.count++] = e;
  st.node[st.count] = n;
  st.weight[st.count++] = -e;
  for (int b = 0; b < grid.dim; ++b) {
    if (b == a) continue;
    Vec3 w = Vec3::Zero();
    w[b] = 0.25 / h;
    const std::ptrdiff_t sb = grid.stride(b);
    for (std::size_t base : {n, m}) {
      st.node[st.count] = base + sb;
      st.weight[st.count++] = w;
      st.node[st.count] = base - sb;
      st.weight[st.count++] = -w;
    }
  }
  return st;
}

Vec3 JangOperator::face_gradient(const Field& u, std::size_t n, int a) const {
  const FaceStencil st = face_stencil(n, a);
  Vec3 q = Vec3::Zero();
  for (int i = 0; i < st.count; ++i) {
    slot(st.node[i]);
    q += st.weight[i] * u[st.node[i]];
  }
  return q;
}

double JangOperator::face_flux(const Field& u, std::size_t n, int a) const {
  const FaceData& f = faces_[3 * slot(n) + a];
  if (!f.valid) fail(ErrorKind::Masking, "operator: missing face");
  const Vec3 q = face_gradient(u, n, a);
  const Vec3 sq = f.s * q;
  const double v = std::sqrt(1.0 + q.dot(sq) / f.sqrtg);
  return sq[a] / v;
}

double JangOperator::mean_curvature(const Field& u, std::size_t n) const {
  check_interior(n);
  const CartesianGrid& grid = domain_->grid;
  double div = 0.0;
  for (int a = 0; a < grid.dim; ++a) div += face_flux(u, n, a) - face_flux(u, n - grid.stride(a), a);
  return div / (nodes_[slot(n)].sqrtg * grid.h);
}

double JangOperator::residual_at(const GraphSolution& s, std::size_t n) const {
  const double H = mean_curvature(s.u, n);
  const GraphPoint gp = point(s.u, n, s.eps);
  if (mode_ == OperatorMode::Mots) return H + gp.trace - s.t * s.u[n];
  return H - std::sqrt(gp.trace * gp.trace + s.eps * s.eps) - s.t * s.u[n];
}

ResidualField JangOperator::residual(const GraphSolution& s) const {
  if (mode_ == OperatorMode::Generalized && !(s.eps > 0.0))
    fail(ErrorKind::Parameter, "regularization eps must be positive");
  ResidualField r;
  r.values.assign(domain_->grid.node_count(), 0.0);
  for (std::size_t n : domain_->interior) {
    r.values[n] = residual_at(s, n);
    r.sup = std::max(r.sup, std::abs(r.values[n]));
  }
  return r;
}

SparseMatrix JangOperator::linearize(const GraphSolution& s) const {
  const CartesianGrid& grid = domain_->grid;
  const double h = grid.h;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(dof_count() * (grid.dim == 3 ? 26 : 12));

  auto add = [&](std::int64_t row, std::size_t k, double val) {
    if (dof_[k] >= 0) {
      trip.emplace_back(row, dof_[k], val);
    } else if (ghost_[k] >= 0) {
      const GhostLink& gl = domain_->ghosts[ghost_[k]];
      trip.emplace_back(row, dof_[gl.anchor], val * gl.rho);
    } else {
      fail(ErrorKind::Masking, "linearize: stencil reaches exterior node");
    }
  };

  for (std::size_t n : domain_->interior) {
    const std::int64_t row = dof_[n];
    const NodeData& d = nodes_[slot(n)];
    const double scale = 1.0 / (d.sqrtg * h);
    for (int a = 0; a < grid.dim; ++a) {
      for (int side = 0; side < 2; ++side) {
        const std::size_t m = side == 0 ? n : n - grid.stride(a);
        const double sign = side == 0 ? scale : -scale;
        const FaceData& f = faces_[3 * slot(m) + a];
        const FaceStencil st = face_stencil(m, a);
        Vec3 q = Vec3::Zero();
        for (int i = 0; i < st.count; ++i) q += st.weight[i] * s.u[st.node[i]];
        const Vec3 sq = f.s * q;
        const double v = std::sqrt(1.0 + q.dot(sq) / f.sqrtg);
        const Vec3 dF = f.s.row(a).transpose() / v - sq[a] * sq / (f.sqrtg * v * v * v);
        for (int i = 0; i < st.count; ++i) add(row, st.node[i], sign * dF.dot(st.weight[i]));
      }
    }

    const GraphPoint gp = point(s.u, n, s.eps);
    const Vec3 y = d.ginv * gp.du;
    const double v2 = gp.v * gp.v;
    const double ypy = y.dot(d.p * y);
    Vec3 dtau = -2.0 * d.ginv * (d.p * y) / v2 + 2.0 * ypy * y / (v2 * v2);
    double factor;
    if (mode_ == OperatorMode::Mots) {
      dtau += 2.0 * s.eps * d.phi * y / (v2 * v2);
      factor = 1.0;
    } else {
      factor = -gp.trace / std::sqrt(gp.trace * gp.trace + s.eps * s.eps);
    }
    for (int a = 0; a < grid.dim; ++a) {
      const double w = factor * dtau[a] / (2.0 * h);
      add(row, n + grid.stride(a), w);
      add(row, n - grid.stride(a), -w);
    }
    add(row, n, -s.t);
  }
  SparseMatrix J(dof_count(), dof_count());
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

Field graph_mean_curvature(const JangOperator& op, const GraphSolution& s) {
  Field out(op.domain().grid.node_count(), 0.0);
  for (std::size_t n : op.domain().interior) out[n] = op.mean_curvature(s.u, n);
  return out;
}

Field graph_trace_p(const JangOperator& op, const GraphSolution& s) {
  Field out(op.domain().grid.node_count(), 0.0);
  for (std::size_t n : op.domain().interior) out[n] = op.point(s.u, n, s.eps).trace;
  return out;
}

Field regularized_trace(const JangOperator& op, const GraphSolution& s, double eps) {
  if (!(eps > 0.0)) fail(ErrorKind::Parameter, "regularization eps must be positive");
  Field out = graph_trace_p(op, s);
  for (std::size_t n : op.domain().interior) out[n] = std::sqrt(out[n] * out[n] + eps * eps);
  return out;
}

ResidualField residual(const JangOperator& op, const GraphSolution& s) { return op.residual(s); }

SparseMatrix linearize(const JangOperator& op, const GraphSolution& s) { return op.linearize(s); }

double kappa_squared(const DataNorms& norms, int dim) {
  return dim * norms.ric_c0 + 8.0 * dim * (norms.p_c0 * norms.p_c0 + norms.dp_c0) + 1.0;
}

namespace {

bool block_is_interior(const DomainGrid& d, std::size_t n) {
  const CartesianGrid& g = d.grid;
  const auto c = g.coords(n);
  const int kz = g.dim == 3 ? 1 : 0;
  for (int dk = -kz; dk <= kz; ++dk)
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di)
        if (d.kind[g.index(c[0] + di, c[1] + dj, c[2] + dk)] != NodeKind::Interior) return false;
  return true;
}

}  // namespace

double graph_second_fundamental_form(const JangOperator& op, const Field& u, std::size_t n) {
  const DomainGrid& d = op.domain();
  const CartesianGrid& g = d.grid;
  const int dim = g.dim;
  const double h = g.h;
  if (!d.is_interior(n)) fail(ErrorKind::Masking, "second fundamental form needs an interior node");
  const GraphPoint gp = op.point(u, n, 0.0);
  Mat3 hess = Mat3::Zero();
  for (int a = 0; a < dim; ++a) {
    const std::ptrdiff_t sa = g.stride(a);
    hess(a, a) = (u[n + sa] - 2.0 * u[n] + u[n - sa]) / (h * h);
    for (int b = a + 1; b < dim; ++b) {
      const std::ptrdiff_t sb = g.stride(b);
      hess(a, b) = hess(b, a) =
          (u[n + sa + sb] - u[n + sa - sb] - u[n - sa + sb] + u[n - sa - sb]) / (4.0 * h * h);
    }
  }
  const Christoffel gam = christoffel(op.data().evaluate(g.position(n)), dim);
  for (int k = 0; k < dim; ++k) hess -= gam[k] * gp.du[k];
  const Mat3& ginv = op.inverse_metric(n);
  const Vec3 y = ginv * gp.du;
  const Mat3 gamma_inv = ginv - y * y.transpose() / (gp.v * gp.v);
  const Mat3 hh = hess / gp.v;
  return (gamma_inv * hh * gamma_inv * hh).trace();
}

DefectField stretch_subharmonic_defect(const JangOperator& op, const GraphSolution& s, double kappa2) {
  const DomainGrid& d = op.domain();
  const CartesianGrid& g = d.grid;
  const int dim = g.dim;
  const double h = g.h;
  const std::size_t count = g.node_count();
  DefectField out;
  out.values.assign(count, 0.0);
  out.evaluated.assign(count, 0);

  Field w(count, 1.0);
  for (std::size_t n : d.interior) w[n] = 1.0 / op.point(s.u, n, s.eps).v;

  // Face flux of sqrt(gamma) gamma^{aj} d_j w, gamma the induced metric of the graph.
  auto flux = [&](std::size_t m, int a) {
    const std::size_t mp = m + g.stride(a);
    Vec3 e = Vec3::Zero();
    e[a] = 1.0 / h;
    Vec3 q = e * (s.u[mp] - s.u[m]);
    Vec3 dw = e * (w[mp] - w[m]);
    for (int b = 0; b < dim; ++b) {
      if (b == a) continue;
      const std::ptrdiff_t sb = g.stride(b);
      q[b] = (s.u[m + sb] - s.u[m - sb] + s.u[mp + sb] - s.u[mp - sb]) / (4.0 * h);
      dw[b] = (w[m + sb] - w[m - sb] + w[mp + sb] - w[mp - sb]) / (4.0 * h);
    }
    const DataSample ds = op.data().evaluate(0.5 * (g.position(m) + g.position(mp)));
    const Mat3 ginv = ds.g.inverse();
    const double sqrtg = std::sqrt(ds.g.topLeftCorner(dim, dim).determinant());
    const Vec3 y = ginv * q;
    const double v2 = 1.0 + q.dot(y);
    const Vec3 fv = sqrtg * std::sqrt(v2) * (ginv * dw - y * y.dot(dw) / v2);
    return fv[a];
  };

  for (std::size_t n : d.interior) {
    if (!block_is_interior(d, n)) continue;
    const GraphPoint gp = op.point(s.u, n, s.eps);
    double div = 0.0;
    for (int a = 0; a < dim; ++a) div += flux(n, a) - flux(n - g.stride(a), a);
    const double lap = div / (op.volume_factor(n) * gp.v * h);
    const double h2 = graph_second_fundamental_form(op, s.u, n);
    const double c = 1.0 - 1.0 / (3.0 * (dim - 1));
    out.values[n] = c * h2 / gp.v + lap - kappa2 / gp.v;
    out.evaluated[n] = 1;
    out.max_positive = std::max(out.max_positive, out.values[n]);
  }
  return out;
}

StabilityTerms graph_stability_terms(const JangOperator& op, const GraphSolution& s, const Field& phi) {
  const DomainGrid& d = op.domain();
  const CartesianGrid& g = d.grid;
  const double cell = std::pow(g.h, g.dim);
  StabilityTerms out;
  for (std::size_t n : d.interior) {
    if (!block_is_interior(d, n)) continue;
    const GraphPoint gp = op.point(s.u, n, s.eps);
    Vec3 dphi = Vec3::Zero();
    for (int a = 0; a < g.dim; ++a) dphi[a] = (phi[n + g.stride(a)] - phi[n - g.stride(a)]) / (2.0 * g.h);
    const Mat3& ginv = op.inverse_metric(n);
    const Vec3 y = ginv * gp.du;
    const double grad2 = dphi.dot(ginv * dphi) - std::pow(y.dot(dphi), 2) / (gp.v * gp.v);
    const double dmu = op.volume_factor(n) * gp.v * cell;
    out.gradient += grad2 * dmu;
    out.mass += phi[n] * phi[n] * dmu;
    if (phi[n] != 0.0) out.curvature += graph_second_fundamental_form(op, s.u, n) * phi[n] * phi[n] * dmu;
  }
  return out;
}

}  // namespace gahf
