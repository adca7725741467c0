#include "hardylab/core/error.hpp"

namespace hardylab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Usage: return "usage error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Numeric: return "numeric error";
    case ErrorKind::Precondition: return "precondition error";
    case ErrorKind::Degenerate: return "degenerate input";
  }
  return "error";
}

}  // namespace hardylab
