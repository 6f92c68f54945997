#include "gahf/spherical_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "gahf/error.hpp"

namespace gahf {

namespace {

struct RadialFamily {
  FamilyTag tag;
  double mass;
  double sign;
};

RadialFamily radial_family(const AnalyticFamily& family) {
  family.validate();
  switch (family.tag) {
    case FamilyTag::Flat: return {family.tag, 0.0, 0.0};
    case FamilyTag::IsotropicSchwarzschild:
    case FamilyTag::PainleveGullstrand:
      if (family.sources.size() != 1) fail(ErrorKind::Domain, "oracle: family has no spherical symmetry");
      return {family.tag, family.sources.front().mass, family.p_sign};
    default: fail(ErrorKind::Domain, "oracle: family has no spherical symmetry");
  }
}

double family_scale(const AnalyticFamily& family) {
  double m = 0.0;
  for (const auto& s : family.sources) m += s.mass;
  return m > 0.0 ? m : 1.0;
}

/// p(nu, nu) for the unit radial normal.
double radial_normal_component(const RadialFamily& f, double r) {
  if (f.tag != FamilyTag::PainleveGullstrand) return 0.0;
  return -0.5 * f.sign * std::sqrt(2.0 * f.mass / (r * r * r));
}

void check_radius(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::Domain, "oracle: radius must be positive");
}

double horizon_function(const AnalyticFamily& family, int dim, HorizonMode mode, double r) {
  const RadialScalars s = radial_scalars(family, dim, r);
  return mode == HorizonMode::Generalized ? s.H - std::abs(s.T) : s.H + s.T;
}

using State = std::array<double, 2>;  // (u, w)

}  // namespace

std::string to_string(HorizonMode mode) { return mode == HorizonMode::Mots ? "mots" : "generalized"; }

HorizonMode parse_horizon_mode(const std::string& text) {
  if (text == "generalized") return HorizonMode::Generalized;
  if (text == "mots") return HorizonMode::Mots;
  fail(ErrorKind::Usage, "unknown mode '" + text + "' (expected generalized or mots)");
}

double radial_length_factor(const AnalyticFamily& family, double r) {
  check_radius(r);
  const RadialFamily f = radial_family(family);
  if (f.tag != FamilyTag::IsotropicSchwarzschild) return 1.0;
  const double psi = 1.0 + f.mass / (2.0 * r);
  return psi * psi;
}

double radial_length_log_slope(const AnalyticFamily& family, double r) {
  check_radius(r);
  const RadialFamily f = radial_family(family);
  if (f.tag != FamilyTag::IsotropicSchwarzschild) return 0.0;
  const double psi = 1.0 + f.mass / (2.0 * r);
  return 2.0 * (-f.mass / (2.0 * r * r)) / psi;
}

RadialScalars radial_scalars(const AnalyticFamily& family, int dim, double r) {
  check_radius(r);
  if (dim < 2) fail(ErrorKind::Parameter, "oracle: dimension must be at least 2");
  const RadialFamily f = radial_family(family);
  RadialScalars s;
  const double A = radial_length_factor(family, r);
  s.H = (dim - 1) * (1.0 / r + radial_length_log_slope(family, r)) / A;
  if (f.tag == FamilyTag::PainleveGullstrand) s.T = (dim - 1) * f.sign * std::sqrt(2.0 * f.mass / (r * r * r));
  return s;
}

double radial_graph_trace(const AnalyticFamily& family, int dim, double r, double w) {
  const RadialFamily f = radial_family(family);
  return radial_scalars(family, dim, r).T + radial_normal_component(f, r) * (1.0 - w * w);
}

std::optional<double> horizon_radius(const AnalyticFamily& family, int dim, HorizonMode mode, double r_lo,
                                     double r_hi) {
  radial_family(family);
  const double m = family_scale(family);
  if (r_lo <= 0.0) r_lo = 1e-3 * m;
  if (r_hi <= 0.0) r_hi = 1e3 * m;
  if (!(r_hi > r_lo)) fail(ErrorKind::Parameter, "oracle: empty radius interval");
  const int samples = 4000;
  double lo = 0.0, hi = 0.0;
  bool found = false;
  double prev_r = r_lo, prev_f = horizon_function(family, dim, mode, r_lo);
  for (int i = 1; i <= samples; ++i) {
    const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / samples);
    const double fr = horizon_function(family, dim, mode, r);
    if ((prev_f < 0.0) != (fr < 0.0)) {
      lo = prev_r;
      hi = r;
      found = true;
    }
    prev_r = r;
    prev_f = fr;
  }
  if (!found) return std::nullopt;
  const bool lo_negative = horizon_function(family, dim, mode, lo) < 0.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if ((horizon_function(family, dim, mode, mid) < 0.0) == lo_negative)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

class RadialSystem {
 public:
  RadialSystem(const AnalyticFamily& family, int dim, const RadialProblem& pb)
      : family_(family), dim_(dim), pb_(pb) {}

  void operator()(const State& x, State& dx, double r) const {
    const double w = std::clamp(x[1], -1.0 + 1e-15, 1.0 - 1e-15);
    const double A = radial_length_factor(family_, r);
    const double tau = radial_graph_trace(family_, dim_, r, w);
    double H;
    if (pb_.mode == HorizonMode::Generalized) {
      H = std::sqrt(tau * tau + pb_.eps * pb_.eps) + pb_.t * x[0];
    } else {
      const double phi = pb_.cutoff ? pb_.cutoff(r) : 1.0;
      H = pb_.t * x[0] - (tau - pb_.eps * phi * (dim_ - w * w));
    }
    dx[0] = A * w / std::sqrt(1.0 - w * w);
    dx[1] = A * H - (dim_ - 1) * w * (1.0 / r + radial_length_log_slope(family_, r));
  }

 private:
  const AnalyticFamily& family_;
  int dim_;
  const RadialProblem& pb_;
};

struct Shot {
  RadialSolution sol;
  double end_value = 0.0;  // u(r_out), or +-1e3 when |w| reached 1
  bool complete = false;
};

Shot shoot(const RadialSystem& sys, const RadialProblem& pb, double u0, double w0) {
  namespace odeint = boost::numeric::odeint;
  auto stepper = odeint::make_controlled(1e-10, 1e-10, odeint::runge_kutta_dopri5<State>());
  Shot shot;
  State x{u0, w0};
  double r = pb.r_in;
  double dr = 1e-4 * (pb.r_out - pb.r_in);
  shot.sol.r.push_back(r);
  shot.sol.u.push_back(x[0]);
  shot.sol.w.push_back(x[1]);
  int steps = 0;
  while (r < pb.r_out) {
    if (++steps > 2000000) fail(ErrorKind::Oracle, "oracle: integrator step limit reached");
    dr = std::min(dr, pb.r_out - r);
    if (stepper.try_step(sys, x, r, dr) != odeint::success) continue;
    if (std::abs(x[1]) >= 1.0 - 1e-13 || !std::isfinite(x[0])) {
      shot.end_value = x[1] > 0.0 ? 1e3 : -1e3;
      return shot;
    }
    shot.sol.r.push_back(r);
    shot.sol.u.push_back(x[0]);
    shot.sol.w.push_back(x[1]);
  }
  shot.end_value = x[0];
  shot.complete = true;
  return shot;
}

}  // namespace

RadialSolution radial_capillary_solve(const AnalyticFamily& family, int dim, const RadialProblem& pb) {
  radial_family(family);
  if (!(pb.r_in > 0.0) || !(pb.r_out > pb.r_in)) fail(ErrorKind::Parameter, "oracle: need 0 < r_in < r_out");
  if (pb.mode == HorizonMode::Generalized && !(pb.eps > 0.0))
    fail(ErrorKind::Parameter, "oracle: eps must be positive");
  if (pb.t < 0.0) fail(ErrorKind::Parameter, "oracle: t must be non-negative");
  const RadialSystem sys(family, dim, pb);

  // Shooting parameter s -> u(r_out) is increasing in s for both conditions.
  auto run = [&](double s) {
    return pb.inner == RadialInnerCondition::Dirichlet ? shoot(sys, pb, pb.inner_value, s) : shoot(sys, pb, s, 0.0);
  };

  double lo = 0.0, hi = 0.0;
  bool bracket = false;
  if (pb.inner == RadialInnerCondition::Dirichlet) {
    std::vector<double> probes;
    for (int i = 0; i < 50; ++i) probes.push_back(-0.99 + 1.89 * i / 49.0);
    for (int i = 0; i < 120; ++i) probes.push_back(1.0 - std::pow(10.0, -1.0 - 12.0 * i / 119.0));
    double prev = run(probes[0]).end_value;
    for (std::size_t i = 1; i < probes.size() && !bracket; ++i) {
      const double cur = run(probes[i]).end_value;
      if ((prev < 0.0) != (cur < 0.0)) {
        lo = probes[i - 1];
        hi = probes[i];
        bracket = true;
      }
      prev = cur;
    }
  } else {
    hi = 0.0;
    if (run(hi).end_value < 0.0) fail(ErrorKind::Oracle, "oracle: no shooting bracket");
    lo = -1.0;
    for (int i = 0; i < 60 && !bracket; ++i) {
      if (run(lo).end_value < 0.0)
        bracket = true;
      else
        lo *= 2.0;
    }
  }
  if (!bracket) fail(ErrorKind::Oracle, "oracle: shooting found no sign change");

  for (int i = 0; i < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (run(mid).end_value < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  Shot a = run(lo), b = run(hi);
  Shot& best = (a.complete && (!b.complete || std::abs(a.end_value) <= std::abs(b.end_value))) ? a : b;
  if (!best.complete) fail(ErrorKind::Oracle, "oracle: shooting did not reach the outer radius");
  best.sol.shooting_parameter = &best == &a ? lo : hi;
  return best.sol;
}

double RadialSolution::value(double x, const AnalyticFamily& family) const {
  if (r.empty()) fail(ErrorKind::Oracle, "oracle: empty solution");
  if (x <= r.front()) return u.front();
  if (x >= r.back()) return u.back();
  const std::size_t k = static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), x) - r.begin()) - 1;
  const double r0 = r[k], r1 = r[k + 1], dr = r1 - r0;
  const double s = (x - r0) / dr;
  auto slope = [&](std::size_t i) {
    return radial_length_factor(family, r[i]) * w[i] / std::sqrt(std::max(1e-300, 1.0 - w[i] * w[i]));
  };
  const double m0 = slope(k), m1 = slope(k + 1);
  const double secant = (u[k + 1] - u[k]) / dr;
  if (std::max(std::abs(m0), std::abs(m1)) > 1e4 * std::max(1.0, std::abs(secant)))
    return u[k] + s * (u[k + 1] - u[k]);
  const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
  const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
  return h00 * u[k] + h10 * dr * m0 + h01 * u[k + 1] + h11 * dr * m1;
}

std::string oracle_table(const AnalyticFamily& family, int dim, double r_lo, double r_hi, int count) {
  if (count < 2) fail(ErrorKind::Parameter, "oracle: table needs at least two rows");
  std::ostringstream out;
  out << "r,H,T\n" << std::setprecision(12);
  for (int i = 0; i < count; ++i) {
    const double r = r_lo + (r_hi - r_lo) * i / (count - 1);
    const RadialScalars s = radial_scalars(family, dim, r);
    out << r << ',' << s.H << ',' << s.T << '\n';
  }
  return out.str();
}

}  // namespace gahf
