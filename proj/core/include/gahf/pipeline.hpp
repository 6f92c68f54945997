#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "gahf/config.hpp"

namespace gahf {

/// 0 all checks pass, 2 verification thresholds missed, 3 solver failure, 4 input error.
enum ExitStatus : int { kExitPass = 0, kExitVerification = 2, kExitSolver = 3, kExitInput = 4 };

int exit_code(ErrorKind kind);

/// Runs `body`; library errors become an error block on `err` (and in
/// `output_dir`/error.txt when a directory is given) plus the mapped exit code.
int guarded(const std::function<int()>& body, std::ostream& err, const std::string& output_dir = "");

/// Horizon search on the configured domain. Writes config.ini, trace.txt,
/// fields/step_NN.csv, horizon.mesh, horizon_vertices.csv, trapped.mask and
/// report.txt into the output directory; the report also goes to `out`.
int run_find(const RunConfig& config, std::ostream& out);

/// Outermost iteration over the configured seeds; adds rounds.csv.
int run_outermost(const RunConfig& config, std::ostream& out);

/// Radial table (oracle.csv) and the root line `r* = ...` or `no horizon`.
int run_oracle(const RunConfig& config, std::ostream& out);

/// Verification checks on an emitted mesh; writes verify_report.txt.
int run_verify(const RunConfig& config, const std::string& mesh_path, std::ostream& out);

}  // namespace gahf
