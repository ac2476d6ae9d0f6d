#pragma once

#include <stdexcept>
#include <string>

namespace hinfdae {

enum class ErrorKind {
  Usage,       // bad arguments, unreadable files
  Dimension,   // non-conforming matrix sizes
  Parse,       // expression or document syntax
  Validation,  // plant or scenario violates a precondition
  Domain,      // scalar argument outside its domain
  Infeasible,  // solver certificate of infeasibility
  Numerical,   // solver / integrator breakdown
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hinfdae
