#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gahf/emit.hpp"
#include "gahf/error.hpp"
#include "gahf/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> family, sources, data, inner, mode, out;
  std::optional<int> dim, nodes, max_rounds, probes, stability_trials;
  std::optional<double> mass, mass2, separation, outer, h, t0, t_min, eps0, eps_min;
  std::vector<std::string> seeds;
  bool no_fields = false;
};

void add_overrides(CLI::App* app, Overrides& o) {
  app->set_help_flag("--help", "print this help");
  app->add_option("-c,--config", o.config, "INI configuration file");
  app->add_option("--family", o.family, "flat | schwarzschild | pg | brill-lindquist | file");
  app->add_option("--dim", o.dim, "2 or 3");
  app->add_option("--mass", o.mass, "mass parameter");
  app->add_option("--sources", o.sources, "point masses 'm@x,y; m@x,y' (pg)");
  app->add_option("--mass2", o.mass2, "second mass (brill-lindquist)");
  app->add_option("--separation", o.separation, "puncture separation (brill-lindquist)");
  app->add_option("--data", o.data, "IDSGRID1 data file (sets family = file)");
  app->add_option("--outer", o.outer, "outer sphere radius");
  app->add_option("--inner", o.inner, "inner balls 'r@x,y; r@x,y'");
  app->add_option("--h", o.h, "grid spacing");
  app->add_option("--nodes", o.nodes, "grid nodes per axis (when --h is absent)");
  app->add_option("--mode", o.mode, "generalized | mots");
  app->add_option("-o,--out", o.out, "output directory");
  app->add_option("--t0", o.t0, "first capillary parameter t");
  app->add_option("--t-min", o.t_min, "last t");
  app->add_option("--eps0", o.eps0, "first regularization eps");
  app->add_option("--eps-min", o.eps_min, "last eps");
  app->add_option("--probes", o.probes, "outer-minimizing probe count");
  app->add_option("--stability-trials", o.stability_trials, "stability test functions");
  app->add_option("--max-rounds", o.max_rounds, "outermost refinement rounds");
  app->add_option("--seed", o.seeds, "seed 'ball r@x,y' or 'mask path' (repeatable)");
  app->add_flag("--no-fields", o.no_fields, "skip per-step field CSV files");
}

gahf::RunConfig resolve(const Overrides& o) {
  gahf::RunConfig c = o.config.empty() ? gahf::RunConfig{} : gahf::load_config(o.config);
  if (o.family) c.family = *o.family;
  if (o.dim) c.dim = *o.dim;
  if (o.mass) c.mass = *o.mass;
  if (o.sources) c.sources = gahf::parse_config_text("[data]\nsources = " + *o.sources + "\n", "--sources").sources;
  if (o.mass2) c.mass2 = *o.mass2;
  if (o.separation) c.separation = *o.separation;
  if (o.data) {
    c.data_file = *o.data;
    c.family = "file";
  }
  if (o.outer) c.outer_radius = *o.outer;
  if (o.inner) {
    const gahf::RunConfig parsed = gahf::parse_config_text("[domain]\ninner = " + *o.inner + "\n", "--inner");
    c.inner = parsed.inner;
  }
  if (o.h) c.h = *o.h;
  if (o.nodes) {
    c.nodes = *o.nodes;
    if (!o.h) c.h = 0.0;
  }
  if (o.mode) c.mode = gahf::parse_horizon_mode(*o.mode);
  if (o.out) c.output_dir = *o.out;
  if (o.t0) c.t0 = *o.t0;
  if (o.t_min) c.t_min = *o.t_min;
  if (o.eps0) c.eps0 = *o.eps0;
  if (o.eps_min) c.eps_min = *o.eps_min;
  if (o.probes) c.probes = *o.probes;
  if (o.stability_trials) c.stability_trials = *o.stability_trials;
  if (o.max_rounds) c.max_rounds = *o.max_rounds;
  if (!o.seeds.empty()) {
    std::string list;
    for (const auto& s : o.seeds) list += s + ";";
    c.seeds = gahf::parse_config_text("[seeds]\nlist = " + list + "\n", "--seed").seeds;
  }
  if (o.no_fields) c.write_fields = false;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized apparent horizon finder"};
  app.require_subcommand(1);
  Overrides o;
  std::string mesh;

  auto* find = app.add_subcommand("find", "solve for the horizon on one domain");
  auto* outer = app.add_subcommand("outermost", "outermost horizon from trapped seeds");
  auto* oracle = app.add_subcommand("oracle", "radial reference values");
  auto* verify = app.add_subcommand("verify", "re-run the checks on an emitted mesh");
  for (auto* sub : {find, outer, oracle, verify}) add_overrides(sub, o);
  verify->add_option("--mesh", mesh, "GAHFMESH1 file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << gahf::error_block(gahf::ErrorKind::Usage, e.what(), gahf::kExitInput);
    return gahf::kExitInput;
  }

  gahf::RunConfig config;
  const int status = gahf::guarded([&] {
    config = resolve(o);
    return 0;
  }, std::cerr);
  if (status != 0) return status;

  return gahf::guarded([&] {
    if (find->parsed()) return gahf::run_find(config, std::cout);
    if (outer->parsed()) return gahf::run_outermost(config, std::cout);
    if (oracle->parsed()) return gahf::run_oracle(config, std::cout);
    return gahf::run_verify(config, mesh, std::cout);
  }, std::cerr, config.output_dir);
}
