#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gahf {

/// Category of a failure. The CLI maps categories to exit codes.
enum class ErrorKind {
  Domain,         // point outside the data's declared box or a singular point
  Data,           // non-positive-definite metric, singular tensor data
  Parse,          // malformed input file
  Geometry,       // invalid domain geometry (intersecting boundaries, empty sets)
  Masking,        // stencil reaches a node outside the computational mask
  Parameter,      // out-of-range numeric parameter
  Admissibility,  // boundary mean-curvature conditions violated
  Barrier,        // no admissible barrier collar / t too large
  Solver,         // Newton stagnation
  Numeric,        // linear solve breakdown
  Extraction,     // surface extraction failed (self-intersection, open mesh)
  Iteration,      // outermost iteration did not converge
  Oracle,         // radial shooting failure
  Usage,          // bad command line / configuration
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace gahf
