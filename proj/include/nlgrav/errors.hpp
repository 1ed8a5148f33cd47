#pragma once

#include <stdexcept>
#include <string>

namespace nlgrav {

/// Invalid input: nonpositive mass, missing scale, bad grid request. Maps to CLI exit code 2.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Kernel evaluated at r = 0 for a model whose kernel diverges there.
class SingularInputError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Grid too coarse for the requested or converged state width.
class ResolutionError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Quadrature, root finding or iteration failed. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, std::string diagnostics = {})
        : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

    const std::string& diagnostics() const noexcept { return diagnostics_; }

private:
    std::string diagnostics_;
};

}  // namespace nlgrav
