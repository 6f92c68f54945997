#include "gahf/emit.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gahf/error.hpp"

namespace gahf {

namespace {

std::size_t c_order_node(const CartesianGrid& grid, std::size_t q) {
  if (grid.dim == 2) return grid.index(static_cast<int>(q / grid.size[1]), static_cast<int>(q % grid.size[1]));
  const int k = static_cast<int>(q % grid.size[2]);
  const std::size_t rest = q / grid.size[2];
  return grid.index(static_cast<int>(rest / grid.size[1]), static_cast<int>(rest % grid.size[1]), k);
}

const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Interior: return "interior";
    case NodeKind::OuterGhost: return "outer_ghost";
    case NodeKind::InnerGhost: return "inner_ghost";
    case NodeKind::Exterior: break;
  }
  return "exterior";
}

/// Whitespace tokenizer that skips `#` comments and tracks line numbers.
class Tokens {
 public:
  Tokens(const std::string& text, std::string origin) : in_(text), origin_(std::move(origin)) {}

  std::string next(const char* what) {
    while (true) {
      std::string tok;
      if (line_ >> tok) {
        if (tok[0] == '#') {
          line_.clear();
          line_.str("");
          continue;
        }
        return tok;
      }
      std::string l;
      if (!std::getline(in_, l)) fail(ErrorKind::Parse, origin_ + ": unexpected end of file, expected " + what);
      ++number_;
      line_.clear();
      line_.str(l);
    }
  }
  double number(const char* what) {
    const std::string tok = next(what);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || !std::isfinite(v)) error(std::string("expected ") + what + ", got '" + tok + "'");
    return v;
  }
  long integer(const char* what) {
    const double v = number(what);
    if (v != std::floor(v)) error(std::string("expected integer ") + what);
    return static_cast<long>(v);
  }
  void expect(const std::string& word) {
    const std::string tok = next(word.c_str());
    if (tok != word) error("expected '" + word + "', got '" + tok + "'");
  }
  bool done() {
    std::string tok;
    while (true) {
      if (line_ >> tok) {
        if (tok[0] == '#') {
          line_.clear();
          line_.str("");
          continue;
        }
        return false;
      }
      std::string l;
      if (!std::getline(in_, l)) return true;
      ++number_;
      line_.clear();
      line_.str(l);
    }
  }
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::Parse, origin_ + ":" + std::to_string(number_) + ": " + msg);
  }

 private:
  std::istringstream in_;
  std::istringstream line_;
  std::string origin_;
  int number_ = 0;
};

}  // namespace

std::string mesh_text(const SurfaceMesh& mesh) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "GAHFMESH1\ndim " << mesh.dim << "\nvertices " << mesh.vertices.size() << "\nelements "
     << mesh.elements.size() << "\n";
  for (const Vec3& v : mesh.vertices) {
    os << v[0] << " " << v[1];
    if (mesh.dim == 3) os << " " << v[2];
    os << "\n";
  }
  for (const auto& e : mesh.elements) {
    os << e[0] << " " << e[1];
    if (mesh.dim == 3) os << " " << e[2];
    os << "\n";
  }
  return os.str();
}

SurfaceMesh parse_mesh_text(const std::string& text, const std::string& origin) {
  Tokens in(text, origin);
  in.expect("GAHFMESH1");
  SurfaceMesh m;
  in.expect("dim");
  m.dim = static_cast<int>(in.integer("dimension"));
  if (m.dim != 2 && m.dim != 3) in.error("dimension must be 2 or 3");
  in.expect("vertices");
  const long nv = in.integer("vertex count");
  in.expect("elements");
  const long ne = in.integer("element count");
  if (nv < 0 || ne < 0) in.error("negative count");
  m.vertices.resize(nv, Vec3::Zero());
  for (auto& v : m.vertices)
    for (int a = 0; a < m.dim; ++a) v[a] = in.number("coordinate");
  m.elements.resize(ne, {0, 0, 0});
  for (auto& e : m.elements)
    for (int a = 0; a < m.dim; ++a) {
      const long i = in.integer("vertex index");
      if (i < 0 || i >= nv) in.error("vertex index " + std::to_string(i) + " out of range");
      e[a] = static_cast<int>(i);
    }
  if (!in.done()) in.error("trailing data");
  return m;
}

SurfaceMesh load_mesh(const std::string& path) { return parse_mesh_text(read_text(path), path); }

std::string field_csv(const DomainGrid& domain, const GraphSolution& s) {
  const CartesianGrid& g = domain.grid;
  std::ostringstream os;
  os << std::setprecision(12);
  os << (g.dim == 2 ? "i,j,x,y,kind,u\n" : "i,j,k,x,y,z,kind,u\n");
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    if (domain.kind[n] == NodeKind::Exterior) continue;
    const auto c = g.coords(n);
    const Vec3 x = g.position(n);
    for (int a = 0; a < g.dim; ++a) os << c[a] << ",";
    for (int a = 0; a < g.dim; ++a) os << x[a] << ",";
    os << kind_name(domain.kind[n]) << "," << s.u[n] << "\n";
  }
  return os.str();
}

std::string vertex_csv(const HorizonSurface& sigma) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << (sigma.mesh.dim == 2 ? "x,y,H,T,h2,valid\n" : "x,y,z,H,T,h2,valid\n");
  for (std::size_t v = 0; v < sigma.mesh.vertices.size(); ++v) {
    for (int a = 0; a < sigma.mesh.dim; ++a) os << sigma.mesh.vertices[v][a] << ",";
    os << sigma.H[v] << "," << sigma.T[v] << "," << sigma.h2[v] << "," << int(sigma.valid[v]) << "\n";
  }
  return os.str();
}

std::string mask_text(const CartesianGrid& grid, const std::vector<char>& mask) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "IDSMASK1\ndim " << grid.dim << "\nsize";
  for (int a = 0; a < grid.dim; ++a) os << " " << grid.size[a];
  os << "\norigin";
  for (int a = 0; a < grid.dim; ++a) os << " " << grid.origin[a];
  os << "\nspacing " << grid.h << "\n";
  const int row = grid.size[grid.dim - 1];
  for (std::size_t q = 0; q < grid.node_count(); ++q) {
    os << (mask[c_order_node(grid, q)] ? '1' : '0');
    os << ((q + 1) % row == 0 ? '\n' : ' ');
  }
  return os.str();
}

std::vector<char> parse_mask_text(const std::string& text, const CartesianGrid& grid, const std::string& origin) {
  Tokens in(text, origin);
  in.expect("IDSMASK1");
  in.expect("dim");
  CartesianGrid g;
  g.dim = static_cast<int>(in.integer("dimension"));
  if (g.dim != 2 && g.dim != 3) in.error("dimension must be 2 or 3");
  in.expect("size");
  for (int a = 0; a < g.dim; ++a) {
    g.size[a] = static_cast<int>(in.integer("size"));
    if (g.size[a] < 2) in.error("size must be at least 2");
  }
  in.expect("origin");
  for (int a = 0; a < g.dim; ++a) g.origin[a] = in.number("origin");
  in.expect("spacing");
  g.h = in.number("spacing");
  const bool origin_ok = (g.origin - grid.origin).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, grid.h);
  if (g.dim != grid.dim || g.size != grid.size || !origin_ok || std::abs(g.h - grid.h) > 1e-12 * grid.h)
    fail(ErrorKind::Geometry, origin + ": mask grid does not match the domain grid");
  std::vector<char> mask(grid.node_count(), 0);
  for (std::size_t q = 0; q < grid.node_count(); ++q) {
    const std::string tok = in.next("mask value");
    if (tok != "0" && tok != "1") in.error("mask values must be 0 or 1, got '" + tok + "'");
    mask[c_order_node(grid, q)] = tok == "1";
  }
  if (!in.done()) in.error("trailing data");
  return mask;
}

std::vector<char> load_mask(const std::string& path, const CartesianGrid& grid) {
  return parse_mask_text(read_text(path), grid, path);
}

std::string error_block(ErrorKind kind, const std::string& message, int exit_code) {
  std::string flat = message;
  for (char& c : flat)
    if (c == '\n') c = ' ';
  std::ostringstream os;
  os << "error.kind = " << to_string(kind) << "\nerror.message = " << flat << "\nerror.exit = " << exit_code << "\n";
  return os.str();
}

std::string rounds_table(const OutermostResult& result, double h) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "round,operation,hausdorff,tolerance,subset,area,level\n";
  for (std::size_t r = 0; r < result.rounds.size(); ++r) {
    const auto& x = result.rounds[r];
    os << r << "," << x.operation << "," << x.hausdorff << "," << 0.5 * h << "," << (x.subset ? 1 : 0) << ","
       << x.area << "," << x.level << "\n";
  }
  return os.str();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parse, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Usage, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::Usage, "write to '" + path + "' failed");
}

}  // namespace gahf
