#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nhscatter {

/// Coarse grouping of failures; the CLI maps each category to an exit code.
enum class ErrorCategory { Config, Numerical, Verification };

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual ErrorCategory category() const noexcept = 0;
};

class ConfigError : public Error {
public:
  using Error::Error;
  ErrorCategory category() const noexcept override { return ErrorCategory::Config; }
};

class NumericalError : public Error {
public:
  using Error::Error;
  ErrorCategory category() const noexcept override { return ErrorCategory::Numerical; }
};

class VerificationError : public Error {
public:
  using Error::Error;
  ErrorCategory category() const noexcept override { return ErrorCategory::Verification; }
};

// Input validation failures.
class InvalidArgument : public ConfigError { using ConfigError::ConfigError; };
class ParseError : public ConfigError { using ConfigError::ConfigError; };
class BandEdge : public ConfigError { using ConfigError::ConfigError; };
class GeometryTooSmall : public ConfigError { using ConfigError::ConfigError; };
class PacketOutOfBounds : public ConfigError { using ConfigError::ConfigError; };
class DimensionTooLarge : public ConfigError { using ConfigError::ConfigError; };
class ConventionMismatch : public ConfigError { using ConfigError::ConfigError; };
class KMismatch : public ConfigError { using ConfigError::ConfigError; };
class NotTwoPort : public ConfigError { using ConfigError::ConfigError; };

// Singular systems. A scattering singularity is physical (lasing or coherent
// absorption threshold) and is reported rather than regularized.
class SingularMatrix : public NumericalError { using NumericalError::NumericalError; };
class ScatteringSingularity : public NumericalError { using NumericalError::NumericalError; };

// A checked identity or measurement precondition did not hold.
class BoundaryContamination : public VerificationError {
  using VerificationError::VerificationError;
};
class PremiseViolated : public VerificationError { using VerificationError::VerificationError; };

/// Port condition failure; carries the first offending entry of q.
class ConditionFailed : public VerificationError {
public:
  ConditionFailed(std::size_t row, std::size_t col, const std::string& what)
      : VerificationError(what), row_(row), col_(col) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

private:
  std::size_t row_;
  std::size_t col_;
};

} // namespace nhscatter
