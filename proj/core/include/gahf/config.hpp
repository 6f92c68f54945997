#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gahf/horizon_algebra.hpp"

namespace gahf {

/// Sphere (disk in 2D) written as `radius@x,y[,z]`.
struct Ball {
  double radius = 1.0;
  Vec3 center = Vec3::Zero();
};

struct SeedSpec {
  enum class Kind { Ball, Mask };
  Kind kind = Kind::Ball;
  Ball ball;
  std::string path;
  std::string label;
};

/// Flat INI configuration. Sections and keys:
///   [data]      family, dim, mass, sources, mass2, separation, file
///   [domain]    outer, inner, h, nodes
///   [schedule]  t0, t_min, eps0, eps_min, newton_tol, max_newton, krylov_tol
///   [verify]    residual_scale, tau_area, probes, stability_trials, seed, stability_seed
///   [run]       mode, output, fields, max_rounds
///   [seeds]     list
struct RunConfig {
  std::string family = "pg";  // flat | schwarzschild | pg | brill-lindquist | file
  int dim = 2;
  double mass = 1.0;
  std::vector<PointMass> sources;  // pg with several centres
  double mass2 = 1.0;
  double separation = 2.0;
  std::string data_file;

  double outer_radius = 6.0;
  std::vector<Ball> inner{Ball{1.0, Vec3::Zero()}};
  double h = 0.0;
  int nodes = 0;

  double t0 = 0.2;
  double t_min = 0.0125;
  double eps0 = 0.04;
  double eps_min = 0.01;
  double newton_tol = 1e-8;
  int max_newton = 80;
  double krylov_tol = 1e-10;

  double residual_scale = 2.0;
  double tau_area = 1e-3;
  int probes = 50;
  int stability_trials = 100;
  std::uint64_t seed = 1;
  std::uint64_t stability_seed = 7;

  HorizonMode mode = HorizonMode::Generalized;
  std::string output_dir = "gahf_out";
  bool write_fields = true;
  int max_rounds = 6;
  std::vector<SeedSpec> seeds;

  /// Usage error naming the offending key.
  void validate() const;
  /// Grid spacing: `h`, or 2 outer / (nodes - 7) so the grid has `nodes` per axis.
  double spacing() const;
};

RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig load_config(const std::string& path);
/// Canonical INI text of a configuration.
std::string config_text(const RunConfig& config);

/// `radius@x,y[,z]`; Usage error on malformed text.
Ball parse_ball(const std::string& text);
/// `m@x,y[,z]`.
PointMass parse_point_mass(const std::string& text);

AnalyticFamily analytic_family(const RunConfig& config);
InitialDataSet make_data(const RunConfig& config);
DomainGrid make_domain(const RunConfig& config, const InitialDataSet& ids);
FinderOptions finder_options(const RunConfig& config);
VerificationOptions verification_options(const RunConfig& config);

}  // namespace gahf
