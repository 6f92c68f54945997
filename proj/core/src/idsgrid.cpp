#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>

#include "gahf/error.hpp"
#include "gahf/initial_data.hpp"

namespace gahf {

namespace {

constexpr std::array<std::array<int, 2>, 3> kPacked2{{{0, 0}, {0, 1}, {1, 1}}};
constexpr std::array<std::array<int, 2>, 6> kPacked3{{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

std::vector<std::array<int, 2>> packed_order(int dim) {
  if (dim == 2) return {kPacked2.begin(), kPacked2.end()};
  return {kPacked3.begin(), kPacked3.end()};
}

/// File node number -> grid index. Files list nodes in C order (last axis fastest).
std::size_t node_from_file_order(const CartesianGrid& grid, std::size_t q) {
  if (grid.dim == 2) {
    const int j = static_cast<int>(q % grid.size[1]);
    const int i = static_cast<int>(q / grid.size[1]);
    return grid.index(i, j);
  }
  const int k = static_cast<int>(q % grid.size[2]);
  const std::size_t rest = q / grid.size[2];
  const int j = static_cast<int>(rest % grid.size[1]);
  const int i = static_cast<int>(rest / grid.size[1]);
  return grid.index(i, j, k);
}

class GriddedSource final : public DataSource {
 public:
  GriddedSource(CartesianGrid grid, std::vector<Field> g, std::vector<Field> p)
      : grid_(grid), g_(std::move(g)), p_(std::move(p)) {
    const auto order = packed_order(grid_.dim);
    for (int k = 0; k < grid_.dim; ++k) {
      dg_[k].resize(order.size());
      dp_[k].resize(order.size());
    }
    for (std::size_t c = 0; c < order.size(); ++c) {
      for (int k = 0; k < grid_.dim; ++k) {
        dg_[k][c].resize(grid_.node_count());
        dp_[k][c].resize(grid_.node_count());
      }
      for (std::size_t n = 0; n < grid_.node_count(); ++n) {
        const Vec3 dgn = node_gradient(grid_, g_[c], n);
        const Vec3 dpn = node_gradient(grid_, p_[c], n);
        for (int k = 0; k < grid_.dim; ++k) {
          dg_[k][c][n] = dgn[k];
          dp_[k][c][n] = dpn[k];
        }
      }
    }
  }

  DataSample sample(const Vec3& x) const override {
    DataSample s;
    const auto order = packed_order(grid_.dim);
    s.g = Mat3::Identity();
    for (std::size_t c = 0; c < order.size(); ++c) {
      const auto [i, j] = order[c];
      s.g(i, j) = s.g(j, i) = interpolate(grid_, g_[c], x);
      s.p(i, j) = s.p(j, i) = interpolate(grid_, p_[c], x);
      for (int k = 0; k < grid_.dim; ++k) {
        s.dg[k](i, j) = s.dg[k](j, i) = interpolate(grid_, dg_[k][c], x);
        s.dp[k](i, j) = s.dp[k](j, i) = interpolate(grid_, dp_[k][c], x);
      }
    }
    return s;
  }

 private:
  CartesianGrid grid_;
  std::vector<Field> g_, p_;
  std::array<std::vector<Field>, 3> dg_, dp_;
};

[[noreturn]] void parse_fail(const std::string& origin, std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << what;
  fail(ErrorKind::Parse, msg.str());
}

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

double parse_double(const std::string& tok, const std::string& origin, std::size_t line,
                    std::size_t column) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size()) {
    std::ostringstream msg;
    msg << "token " << column << " '" << tok << "' is not a number";
    parse_fail(origin, line, msg.str());
  }
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "token " << column << " is not finite";
    parse_fail(origin, line, msg.str());
  }
  return v;
}

}  // namespace

InitialDataSet parse_grid_text(const std::string& text, const std::string& origin) {
  std::vector<Line> lines;
  {
    std::istringstream in(text);
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
      ++number;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      std::istringstream ls(raw);
      Line l{number, {}};
      std::string tok;
      while (ls >> tok) l.tokens.push_back(tok);
      if (!l.tokens.empty()) lines.push_back(std::move(l));
    }
  }
  std::size_t cursor = 0;
  auto expect = [&](const std::string& key) -> const Line& {
    if (cursor >= lines.size()) parse_fail(origin, lines.empty() ? 0 : lines.back().number, "missing '" + key + "' line");
    const Line& l = lines[cursor++];
    if (l.tokens[0] != key) parse_fail(origin, l.number, "expected '" + key + "', found '" + l.tokens[0] + "'");
    return l;
  };
  {
    const Line& magic = expect("IDSGRID1");
    if (magic.tokens.size() != 1) parse_fail(origin, magic.number, "trailing tokens after magic");
  }
  const Line& dim_line = expect("dim");
  if (dim_line.tokens.size() != 2) parse_fail(origin, dim_line.number, "dim needs one value");
  const int dim = static_cast<int>(parse_double(dim_line.tokens[1], origin, dim_line.number, 2));
  if (dim != 2 && dim != 3) parse_fail(origin, dim_line.number, "dim must be 2 or 3");

  CartesianGrid grid;
  grid.dim = dim;
  const Line& size_line = expect("size");
  if (static_cast<int>(size_line.tokens.size()) != dim + 1) parse_fail(origin, size_line.number, "size needs dim values");
  for (int a = 0; a < dim; ++a) {
    const double v = parse_double(size_line.tokens[a + 1], origin, size_line.number, a + 2);
    if (v < 2 || v != std::floor(v)) parse_fail(origin, size_line.number, "sizes must be integers >= 2");
    grid.size[a] = static_cast<int>(v);
  }
  const Line& origin_line = expect("origin");
  if (static_cast<int>(origin_line.tokens.size()) != dim + 1) parse_fail(origin, origin_line.number, "origin needs dim values");
  for (int a = 0; a < dim; ++a) grid.origin[a] = parse_double(origin_line.tokens[a + 1], origin, origin_line.number, a + 2);
  const Line& spacing_line = expect("spacing");
  if (spacing_line.tokens.size() != 2) parse_fail(origin, spacing_line.number, "spacing needs one value");
  grid.h = parse_double(spacing_line.tokens[1], origin, spacing_line.number, 2);
  if (!(grid.h > 0.0)) parse_fail(origin, spacing_line.number, "spacing must be positive");

  bool full = false;
  if (cursor < lines.size() && lines[cursor].tokens[0] == "layout") {
    const Line& l = lines[cursor++];
    if (l.tokens.size() != 2 || (l.tokens[1] != "packed" && l.tokens[1] != "full"))
      parse_fail(origin, l.number, "layout must be 'packed' or 'full'");
    full = l.tokens[1] == "full";
  }

  const auto order = packed_order(dim);
  const std::size_t per_tensor = full ? static_cast<std::size_t>(dim * dim) : order.size();
  const std::size_t nodes = grid.node_count();
  if (lines.size() - cursor != nodes) {
    std::ostringstream msg;
    msg << "expected " << nodes << " node lines, found " << lines.size() - cursor;
    parse_fail(origin, lines.empty() ? 0 : lines.back().number, msg.str());
  }
  std::vector<Field> g(order.size(), Field(nodes)), p(order.size(), Field(nodes));
  for (std::size_t q = 0; q < nodes; ++q) {
    const Line& l = lines[cursor + q];
    if (l.tokens.size() != 2 * per_tensor) {
      std::ostringstream msg;
      msg << "node " << q << " has " << l.tokens.size() << " values, expected " << 2 * per_tensor;
      parse_fail(origin, l.number, msg.str());
    }
    std::vector<double> vals(l.tokens.size());
    for (std::size_t c = 0; c < vals.size(); ++c) vals[c] = parse_double(l.tokens[c], origin, l.number, c + 1);
    Mat3 gm = Mat3::Identity(), pm = Mat3::Zero();
    if (full) {
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
          gm(i, j) = vals[i * dim + j];
          pm(i, j) = vals[per_tensor + i * dim + j];
        }
      const double gs = (gm - gm.transpose()).cwiseAbs().maxCoeff();
      const double ps = (pm - pm.transpose()).cwiseAbs().maxCoeff();
      if (gs > 1e-12 * (1.0 + gm.cwiseAbs().maxCoeff()) || ps > 1e-12 * (1.0 + pm.cwiseAbs().maxCoeff())) {
        std::ostringstream msg;
        msg << "node " << q << ": " << (gs > 0 ? "metric" : "p") << " tensor is not symmetric";
        parse_fail(origin, l.number, msg.str());
      }
    } else {
      for (std::size_t c = 0; c < order.size(); ++c) {
        const auto [i, j] = order[c];
        gm(i, j) = gm(j, i) = vals[c];
        pm(i, j) = pm(j, i) = vals[order.size() + c];
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(gm.topLeftCorner(dim, dim));
    if (llt.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "node " << q << ": metric is not positive definite";
      parse_fail(origin, l.number, msg.str());
    }
    const std::size_t n = node_from_file_order(grid, q);
    for (std::size_t c = 0; c < order.size(); ++c) {
      const auto [i, j] = order[c];
      g[c][n] = gm(i, j);
      p[c][n] = pm(i, j);
    }
  }
  Box box;
  box.lo = grid.origin;
  box.hi = grid.origin;
  for (int a = 0; a < dim; ++a) box.hi[a] += grid.h * (grid.size[a] - 1);
  return InitialDataSet(dim, std::make_shared<GriddedSource>(grid, std::move(g), std::move(p)), box,
                        "gridded:" + origin);
}

InitialDataSet load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parse, "cannot open data file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid_text(buf.str(), path);
}

std::string write_grid_text(const InitialDataSet& ids, const CartesianGrid& grid) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "IDSGRID1\ndim " << grid.dim << "\nsize";
  for (int a = 0; a < grid.dim; ++a) out << ' ' << grid.size[a];
  out << "\norigin";
  for (int a = 0; a < grid.dim; ++a) out << ' ' << grid.origin[a];
  out << "\nspacing " << grid.h << "\n";
  const auto order = packed_order(grid.dim);
  for (std::size_t q = 0; q < grid.node_count(); ++q) {
    const DataSample s = ids.evaluate(grid.position(node_from_file_order(grid, q)));
    for (std::size_t c = 0; c < order.size(); ++c) out << (c ? " " : "") << s.g(order[c][0], order[c][1]);
    for (const auto& ij : order) out << ' ' << s.p(ij[0], ij[1]);
    out << '\n';
  }
  return out.str();
}

}  // namespace gahf
