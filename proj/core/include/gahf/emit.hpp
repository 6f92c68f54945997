#pragma once

#include <string>
#include <vector>

#include "gahf/horizon_algebra.hpp"

namespace gahf {

/// ASCII mesh: header `GAHFMESH1`, `dim`, `vertices N`, `elements M`, then N
/// coordinate lines and M 0-based index lines (2 per segment, 3 per triangle).
std::string mesh_text(const SurfaceMesh& mesh);
SurfaceMesh parse_mesh_text(const std::string& text, const std::string& origin = "<mesh>");
SurfaceMesh load_mesh(const std::string& path);

/// CSV with one row per node inside the grid: i,j[,k],x,y[,z],kind,u.
std::string field_csv(const DomainGrid& domain, const GraphSolution& s);

/// CSV with one row per horizon vertex: x,y[,z],H,T,h2,valid.
std::string vertex_csv(const HorizonSurface& sigma);

/// IDSMASK1 node mask: header with dim/size/origin/spacing, then one 0/1 per
/// node with the last axis fastest.
std::string mask_text(const CartesianGrid& grid, const std::vector<char>& mask);
/// Parse error on a malformed file, Geometry error when the header grid differs from `grid`.
std::vector<char> parse_mask_text(const std::string& text, const CartesianGrid& grid,
                                  const std::string& origin = "<mask>");
std::vector<char> load_mask(const std::string& path, const CartesianGrid& grid);

/// `error.kind`, `error.message` and `error.exit` lines.
std::string error_block(ErrorKind kind, const std::string& message, int exit_code);

/// One row per outermost round.
std::string rounds_table(const OutermostResult& result, double h);

std::string read_text(const std::string& path);
/// Creates parent directories.
void write_text(const std::string& path, const std::string& text);

}  // namespace gahf
