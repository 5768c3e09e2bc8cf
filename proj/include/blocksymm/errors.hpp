#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace blocksymm {

/// Invalid user-supplied parameter. `field()` names the offending field
/// using the dotted path of the configuration file where one exists.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)), message_(message) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    std::string field_;
    std::string message_;
};

/// Argument outside the mathematical domain of a function (negative input to
/// psi, p <= e for the sub-exponential bound, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A concentration bound whose log argument is <= 1 carries no information.
class VacuousBoundError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Quadrature non-convergence, non-finite Monte Carlo averages, overflow.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace blocksymm
