#pragma once

#include <stdexcept>
#include <string>

namespace spinsq {

enum class ErrorKind {
  InvalidParameter,
  Unsupported,
  Resource,
  Integrator,
  NoInteriorMinimum,
  Physicality,
  Validity,
};

/// Single exception type for the library. `kind()` separates bad inputs from
/// numerical failures so callers (the CLI in particular) can map them to
/// distinct exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  bool is_numerical() const noexcept {
    return kind_ == ErrorKind::Integrator || kind_ == ErrorKind::Physicality ||
           kind_ == ErrorKind::Validity || kind_ == ErrorKind::NoInteriorMinimum;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::InvalidParameter, what);
}

}  // namespace spinsq
