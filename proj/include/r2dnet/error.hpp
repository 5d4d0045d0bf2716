#pragma once

#include <stdexcept>
#include <string>

namespace r2dnet {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  NonFiniteValue,
  NonCanonicalSupply,
  ZeroGain,
  InfeasibleEverywhere,
  QNotNegative,
  AlgebraicLoop,
  NonFiniteState,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the grid simulators when a state leaves the finite range.
class NonFiniteStateError : public Error {
 public:
  NonFiniteStateError(int i, int j, const std::string& what)
      : Error(ErrorKind::NonFiniteState, what), i_(i), j_(j) {}

  int i() const noexcept { return i_; }
  int j() const noexcept { return j_; }

 private:
  int i_;
  int j_;
};

}  // namespace r2dnet
