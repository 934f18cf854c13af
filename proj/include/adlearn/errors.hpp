#pragma once

#include <stdexcept>
#include <string>

namespace adlearn {

// Argument outside the documented domain of an operation (index bounds,
// orders, sample sizes).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Model parameters violate the maintained assumptions.
class ParameterError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A closed form is evaluated where its assumptions fail (zero denominators,
// non-identified configurations).
class AssumptionError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Numerical failure during estimation.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CollinearityError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

class DegenerateRegressorError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

// Malformed experiment configuration or command-line value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace adlearn
