#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace homoflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values, shape mismatches, out-of-range arguments.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Parameter outside the mathematical domain of a closed form (e.g. p >= 2).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller violated a precondition that has a documented remedy.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// P(psi) vanished where a nonzero value is required.
class SteadyStateError : public Error {
 public:
  using Error::Error;
};

/// Denominators of an eigenvalue estimate are degenerate.
class UndefinedEigenvalue : public Error {
 public:
  using Error::Error;
};

/// Explicit evolution produced non-finite values.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : Error(what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// A snapshot step with <psi_{k+1} - psi_k, psi_k> >= 0.
class NonDissipativeError : public Error {
 public:
  NonDissipativeError(std::size_t index, const std::string& what)
      : Error(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace homoflow
