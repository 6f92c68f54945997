#include "gahf/error.hpp"

namespace gahf {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Data: return "data";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::Masking: return "masking";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Admissibility: return "admissibility";
    case ErrorKind::Barrier: return "barrier";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Extraction: return "extraction";
    case ErrorKind::Iteration: return "iteration";
    case ErrorKind::Oracle: return "oracle";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace gahf
