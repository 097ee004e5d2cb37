// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace invrob {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a precondition: wrong dimensions, infeasible design point, bad index.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A user function produced a non-finite value. Carries the offending
/// component index and the evaluation point when known.
class EvaluationError : public Error {
 public:
  using Error::Error;
  EvaluationError(const std::string& what, std::size_t index, std::vector<double> x, std::vector<double> u)
      : Error(what), index_(index), x_(std::move(x)), u_(std::move(u)) {}

  std::size_t index() const { return index_; }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& u() const { return u_; }

 private:
  std::size_t index_ = 0;
  std::vector<double> x_;
  std::vector<double> u_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A user-supplied callback returned a value violating its contract.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Requested combination is not implemented (e.g. scaled sets above dimension 3).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// The problem has no feasible point (nominal scenarios cannot be covered).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Problem-spec or expression could not be parsed.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace invrob
