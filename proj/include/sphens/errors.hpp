#pragma once

#include <stdexcept>
#include <string>

namespace sphens {

/// Base of every error raised by the library. The CLI maps DomainError to
/// exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NorthPoleError : public DomainError {
 public:
  NorthPoleError() : DomainError("NorthPole: point has no stereographic image") {}
};

class InfiniteEnergyError : public DomainError {
 public:
  explicit InfiniteEnergyError(double s)
      : DomainError("InfiniteEnergy: expected Riesz s-energy is infinite for s >= 4 (s = " +
                    std::to_string(s) + ")") {}
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class RejectionBudgetExceeded : public Error {
 public:
  using Error::Error;
};

class CoincidentPointsError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class TooFewSamplesError : public Error {
 public:
  using Error::Error;
};

class UnboundStatisticError : public Error {
 public:
  using Error::Error;
};

/// Malformed files, unreadable paths, schema violations.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sphens
