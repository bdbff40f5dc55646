#ifndef PLASMAEQ_ERRORS_HPP
#define PLASMAEQ_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace plasmaeq {

/// Bad argument supplied by the caller (usage/config class of failure).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures of a numerical procedure on valid input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stencil or evaluation point lies outside the declared domain.
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Coordinate basis undefined (r = 0 or rho = 0).
class SingularAxisError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// tau >= 1: sqrt(1 - tau) has no real value.
class FirehoseRegimeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class RootSearchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Vanishing normalization or multiplier.
class DegenerateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Stability criterion undefined at the query point (p_par = 0).
class UndefinedCriterionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Iterative solver failed to converge. Carries the max-update history.
class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, std::vector<double> history)
      : NumericalError(what), history_(std::move(history)) {}

  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Malformed configuration file or value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace plasmaeq

#endif  // PLASMAEQ_ERRORS_HPP
