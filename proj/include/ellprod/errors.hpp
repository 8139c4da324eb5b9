#pragma once

#include <stdexcept>
#include <string>

namespace ellprod {

// Input violates a documented invariant (rho out of range, bad n, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Caller broke a precondition on an otherwise valid object.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual = 0.0, int iterations = 0)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

class BranchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ellprod
