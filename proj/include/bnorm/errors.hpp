#pragma once

#include <stdexcept>
#include <string>

namespace bnorm {

/// Argument outside the mathematical domain of an operation (|w| >= 1, m > 1, x <= 0, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Caller violated an operation precondition that is not a pure domain issue
/// (n = 1 for ell, c <= b for the Euler integral, invalid QuadratureSpec, ...).
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// A closed form or series that does not converge for the given parameters.
class DivergenceError : public std::domain_error {
public:
    explicit DivergenceError(const std::string& what) : std::domain_error(what) {}
};

/// Monte Carlo or quadrature that produced non-finite samples, a detected
/// non-integrable blow-up, or a failed internal cross-check.
class IntegrationFailure : public std::runtime_error {
public:
    explicit IntegrationFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bnorm
