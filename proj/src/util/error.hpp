#pragma once

#include <stdexcept>
#include <string>

namespace exknet {

// Error categories mirror the C API status codes (see include/exknet.h).
enum class ErrorKind {
  Argument,   // caller violated a precondition
  Domain,     // value outside the mathematical domain of an operation
  Io,         // filesystem / OS failure
  Format,     // malformed or unsupported file content
  Numeric,    // numerical failure (divergence, root search, NaN loss)
  Stability,  // unstable filter / non-monotone LSF
  State       // object used in an incompatible state (kind/config mismatch)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_argument(const std::string& msg) { throw Error(ErrorKind::Argument, msg); }
[[noreturn]] inline void throw_domain(const std::string& msg) { throw Error(ErrorKind::Domain, msg); }
[[noreturn]] inline void throw_io(const std::string& msg) { throw Error(ErrorKind::Io, msg); }
[[noreturn]] inline void throw_format(const std::string& msg) { throw Error(ErrorKind::Format, msg); }
[[noreturn]] inline void throw_numeric(const std::string& msg) { throw Error(ErrorKind::Numeric, msg); }
[[noreturn]] inline void throw_stability(const std::string& msg) { throw Error(ErrorKind::Stability, msg); }
[[noreturn]] inline void throw_state(const std::string& msg) { throw Error(ErrorKind::State, msg); }

}  // namespace exknet
