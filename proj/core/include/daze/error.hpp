#pragma once

#include <stdexcept>
#include <string>

namespace daze {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model (MDP tensor, policy table) is not well formed.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A caller supplied an out-of-range or inconsistent argument.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// The operation does not apply to this kind of environment or space.
class UnsupportedError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// An API was used out of order (e.g. step before reset).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// An operation refused to run because a precondition does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed the configured budget.
class BudgetError : public PreconditionError {
 public:
  BudgetError(const std::string& what, double required, double budget)
      : PreconditionError(what), required_(required), budget_(budget) {}

  double required() const noexcept { return required_; }
  double budget() const noexcept { return budget_; }

 private:
  double required_;
  double budget_;
};

/// Rejection sampling gave up.
class GenerationError : public Error {
 public:
  GenerationError(const std::string& what, int attempts)
      : Error(what), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

/// Invalid run configuration; `key()` names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Training diverged or produced non-finite statistics.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace daze
