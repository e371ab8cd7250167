#pragma once

#include <stdexcept>
#include <string>

namespace zf {

enum class ErrorKind {
  Config,
  Domain,
  GraphValidity,
  Singularity,
  Numerical,
  Solvability,
  Invertibility,
  StepSize,
  NonConvergence,
  Integrity,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind k, const std::string& what) : std::runtime_error(what), kind_(k) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& what) { throw Error(k, what); }

}  // namespace zf
