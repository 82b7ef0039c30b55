#pragma once

#include <stdexcept>
#include <string>

namespace scalekernel {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A family parameter violates its positivity or count constraint.
class InvalidParameter : public Error {
  public:
    using Error::Error;
};

/// A user-supplied coefficient callable failed or returned a non-finite value.
class CoefficientDomainError : public Error {
  public:
    using Error::Error;
};

/// Special-function order outside the supported range (e.g. Hermite v >= 0).
class OrderDomainError : public Error {
  public:
    using Error::Error;
};

/// Argument outside a function's domain.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Kummer M evaluated at a nonpositive-integer second parameter.
class ParameterPole : public Error {
  public:
    using Error::Error;
};

/// Adaptive quadrature could not meet the requested tolerance.
class QuadratureNonConvergence : public Error {
  public:
    using Error::Error;
};

/// No closed-form eigenfunctions for the requested family.
class UnsupportedFamily : public Error {
  public:
    using Error::Error;
};

/// The adaptive ODE integrator could not complete the requested range.
class IntegrationFailure : public Error {
  public:
    using Error::Error;
};

/// A standing model assumption (e.g. sigma > 0) failed during integration.
class AssumptionViolation : public Error {
  public:
    using Error::Error;
};

/// Interval arguments do not satisfy the required ordering x < y < z.
class OrderingError : public Error {
  public:
    using Error::Error;
};

/// The barrier-sensitivity function never changed sign below the bracket ceiling.
class NoBracket : public Error {
  public:
    using Error::Error;
};

/// A scale-kernel denominator collapsed below the representable floor.
class DegenerateKernel : public Error {
  public:
    using Error::Error;
};

/// Simulation configuration violates its invariants.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Config file is not syntactically valid key/value text.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, int line, int column)
        : Error(what + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_;
    int column_;
};

/// Config file is syntactically valid but violates the schema.
class SchemaError : public Error {
  public:
    using Error::Error;
};

}  // namespace scalekernel
