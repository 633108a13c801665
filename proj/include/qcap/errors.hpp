#pragma once

#include <stdexcept>
#include <string>

namespace qcap {

/// Base class of every error raised by the library. `field()` names the
/// offending input (e.g. "zeta") when one can be identified.
class Error : public std::runtime_error {
public:
    Error(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Input outside its documented domain (ranges, negative times, non-PSD states).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Parameters violate a coupling constraint (zeta^2 + mu^2 <= 1, PSD rates).
class ConstraintError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: non-finite integrand, loss of positivity, non-convergence.
class NumericalError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed command line or configuration.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace qcap
