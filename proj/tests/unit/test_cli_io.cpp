#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "gahf/emit.hpp"
#include "gahf/error.hpp"
#include "gahf/pipeline.hpp"

using namespace gahf;

namespace {

std::string scratch(const std::string& name) {
  const char* env = std::getenv("GAHF_TEST_TMP");
  const std::filesystem::path base = env ? env : std::filesystem::temp_directory_path() / "gahf_cli_io";
  return (base / name).string();
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Usage;
}

}  // namespace

TEST_CASE("config parsing with defaults") {
  const RunConfig c = parse_config_text(
      "[data]\nfamily = pg\nsources = 0.5@-0.75,0; 0.5@0.75,0\n"
      "[domain]\nouter = 8\ninner = 0.4@-0.75,0; 0.4@0.75,0\nnodes = 200\n"
      "[run]\nmode = mots\n[seeds]\nlist = disk 0.6@-0.75,0; mask seeds/a.mask\n");
  CHECK(c.family == "pg");
  REQUIRE(c.sources.size() == 2);
  CHECK(c.sources[1].center.x() == 0.75);
  CHECK(c.inner.size() == 2);
  CHECK(c.inner[0].radius == 0.4);
  CHECK(c.spacing() == doctest::Approx(16.0 / 193.0));
  CHECK(c.mode == HorizonMode::Mots);
  REQUIRE(c.seeds.size() == 2);
  CHECK(c.seeds[0].kind == SeedSpec::Kind::Ball);
  CHECK(c.seeds[1].kind == SeedSpec::Kind::Mask);
  CHECK(c.seeds[1].path == "seeds/a.mask");
  CHECK(c.t0 == 0.2);
  CHECK(c.eps_min == 0.01);
  c.validate();

  const RunConfig back = parse_config_text(config_text(c));
  CHECK(config_text(back) == config_text(c));
}

TEST_CASE("config errors name the key") {
  try {
    parse_config_text("[domain]\nouterr = 3\n");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Usage);
    CHECK(std::string(e.what()).find("domain.outerr") != std::string::npos);
  }
  CHECK(kind_of([] { parse_config_text("[domain]\nouter = six\n"); }) == ErrorKind::Usage);
  CHECK(kind_of([] { parse_config_text("[domain\nouter = 6\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_ball("1@2"); }) == ErrorKind::Usage);
  CHECK(kind_of([] { load_config("/nonexistent.ini"); }) == ErrorKind::Parse);
  RunConfig c;
  c.t_min = 0.5;
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::Usage);
  c = RunConfig{};
  c.family = "kerr";
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::Usage);
}

TEST_CASE("finder options follow the config") {
  RunConfig c;
  c.t0 = 0.4;
  c.t_min = 0.05;
  c.eps0 = 0.02;
  c.eps_min = 0.01;
  c.mode = HorizonMode::Mots;
  const FinderOptions o = finder_options(c);
  CHECK(o.schedule.t_values == std::vector<double>{0.4, 0.2, 0.1, 0.05});
  CHECK(o.schedule.eps_values == std::vector<double>{0.02, 0.01});
  CHECK(o.mode == HorizonMode::Mots);
  const VerificationOptions v = verification_options(c);
  CHECK(v.probes.trials == 50);
  CHECK(v.stability_trials == 100);
}

TEST_CASE("mesh text round trip") {
  SurfaceMesh m;
  m.dim = 3;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
  m.elements = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  const SurfaceMesh back = parse_mesh_text(mesh_text(m));
  CHECK(back.dim == 3);
  CHECK(back.elements == m.elements);
  for (std::size_t v = 0; v < m.vertices.size(); ++v) CHECK(back.vertices[v] == m.vertices[v]);
  CHECK(kind_of([] { parse_mesh_text("GAHFMESH1\ndim 2\nvertices 1\nelements 1\n0 0\n0 5\n"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_mesh_text("OFF\n"); }) == ErrorKind::Parse);
}

TEST_CASE("mask text round trip and grid check") {
  const CartesianGrid g = CartesianGrid::centered(3, 5, 1.0);
  std::vector<char> mask(g.node_count());
  for (std::size_t n = 0; n < mask.size(); ++n) mask[n] = (n * 7) % 3 == 0;
  CHECK(parse_mask_text(mask_text(g, mask), g) == mask);
  const CartesianGrid other = CartesianGrid::centered(3, 5, 1.5);
  CHECK(kind_of([&] { parse_mask_text(mask_text(other, mask), g); }) == ErrorKind::Geometry);
  std::string text = mask_text(g, mask);
  text.back() = '2';
  CHECK(kind_of([&] { parse_mask_text(text, g); }) == ErrorKind::Parse);
}

TEST_CASE("exit codes and error blocks") {
  CHECK(exit_code(ErrorKind::Parse) == 4);
  CHECK(exit_code(ErrorKind::Admissibility) == 4);
  CHECK(exit_code(ErrorKind::Usage) == 4);
  CHECK(exit_code(ErrorKind::Solver) == 3);
  CHECK(exit_code(ErrorKind::Iteration) == 3);
  CHECK(exit_code(ErrorKind::Extraction) == 3);
  CHECK(error_block(ErrorKind::Parse, "bad\nfile", 4) == "error.kind = parse\nerror.message = bad file\nerror.exit = 4\n");
  std::ostringstream err;
  CHECK(guarded([]() -> int { fail(ErrorKind::Barrier, "no collar"); }, err) == 3);
  CHECK(err.str().find("error.kind = barrier") != std::string::npos);
}

TEST_CASE("oracle command") {
  RunConfig c;
  c.output_dir = scratch("oracle");
  std::ostringstream out;
  CHECK(run_oracle(c, out) == 0);
  CHECK(out.str().find("r* = 2 ") != std::string::npos);
  CHECK(std::filesystem::exists(c.output_dir + "/oracle.csv"));
  c.family = "flat";
  std::ostringstream flat;
  run_oracle(c, flat);
  CHECK(flat.str().find("no horizon") != std::string::npos);
}

TEST_CASE("find is deterministic and its mesh verifies") {
  RunConfig c;
  c.inner = {Ball{0.5, Vec3::Zero()}};
  c.h = 0.1;
  c.probes = 10;
  c.stability_trials = 10;
  std::string reports[2];
  for (int k = 0; k < 2; ++k) {
    c.output_dir = scratch("find" + std::to_string(k));
    std::ostringstream out;
    CHECK(run_find(c, out) == 0);
    reports[k] = read_text(c.output_dir + "/report.txt");
  }
  CHECK(reports[0] == reports[1]);
  CHECK(std::filesystem::exists(c.output_dir + "/fields/step_06.csv"));
  CHECK(read_text(c.output_dir + "/trace.txt").find("newton") != std::string::npos);

  const SurfaceMesh mesh = load_mesh(c.output_dir + "/horizon.mesh");
  for (const Vec3& v : mesh.vertices) CHECK(std::abs(v.norm() - 2.0) <= 2 * c.h);
  std::ostringstream out;
  CHECK(run_verify(c, c.output_dir + "/horizon.mesh", out) == 0);

  const auto ids = make_data(c);
  const DomainGrid base = make_domain(c, ids);
  const auto mask = load_mask(c.output_dir + "/trapped.mask", base.grid);
  for (std::size_t n = 0; n < mask.size(); ++n) {
    const double r = base.grid.position(n).norm();
    if (r < 1.7) CHECK(mask[n]);
    if (r > 2.3) CHECK_FALSE(mask[n]);
  }
}

TEST_CASE("data and domain from the config") {
  RunConfig c;
  c.dim = 3;
  c.family = "schwarzschild";
  c.outer_radius = 1.2;
  c.inner = {Ball{0.1, Vec3::Zero()}};
  c.nodes = 40;
  const auto ids = make_data(c);
  CHECK(ids.dimension() == 3);
  const DomainGrid d = make_domain(c, ids);
  CHECK(d.grid.size[0] == 40);
  CHECK(d.inner_components == 1);
  c.family = "file";
  c.data_file = "/nonexistent.ids";
  CHECK(kind_of([&] { make_data(c); }) == ErrorKind::Parse);
}
