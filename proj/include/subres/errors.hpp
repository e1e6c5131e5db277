#pragma once

#include <stdexcept>
#include <string>

namespace subres {

// Invalid user input: bad parameters, malformed files, unmet preconditions.
// The CLI maps every ConfigError to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ConfigError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The domain violates a structural requirement (empty, origin not covered).
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Observation or source point placed where the model forbids it.
class GeometryError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class PreconditionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Failures of the numerics themselves. The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AssemblyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, double last_residual)
      : NumericalError(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

// A converged characteristic point on the wrong sheet (Im kappa > 0 at eps > 0).
class SheetError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Eigenvalue collision along a continuation path.
class PathError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Moment-matrix rank could not be decided; more probe columns are needed.
class RankError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OracleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ResonanceProximityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The hypothesis of a localization statement is not satisfied; the check is
// skipped rather than failed.
class HypothesisNotMet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace subres
