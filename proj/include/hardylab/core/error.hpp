#pragma once

#include <stdexcept>
#include <string>

namespace hardylab {

/// Failure categories shared by every lab module. The C API maps each one to
/// a stable status code, the CLI maps them to exit codes.
enum class ErrorKind {
  Usage,         // unknown name, invalid parameter, excluded parameter value
  Domain,        // point outside a field's or diffusion's domain
  Numeric,       // non-finite value, overflow, failed linear solve
  Precondition,  // operation precondition violated by otherwise valid input
  Degenerate,    // nothing left to compute on (all points skipped, empty grid)
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool ok, ErrorKind kind, const char* what) {
  if (!ok) throw Error(kind, what);
}
// Builds its message up front; keep it off hot paths.
inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace hardylab
