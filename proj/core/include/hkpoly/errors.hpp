#ifndef HKPOLY_ERRORS_HPP
#define HKPOLY_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace hkpoly {

/// Malformed value or inconsistent operands (variable universe mismatch,
/// arity mismatch, bad input document, grid mismatch).
class StructuralError : public std::runtime_error {
public:
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

/// Input outside the mathematical domain of an operation.
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Input admissible in principle but beyond configured resource bounds
/// (exponential degree growth, exponent overflow).
class CapacityError : public std::runtime_error {
public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative numerics failed to converge; carries the residual history.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residual_history(std::move(residuals)) {}
  std::vector<double> residual_history;
};

/// A guaranteed internal invariant was violated; always a bug or corrupted
/// upstream data, never a user error.
class InternalError : public std::logic_error {
public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace hkpoly

#endif
