#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cvswap {

// Caller broke a documented precondition (dimension mismatch, bad index, ...).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Physical parameter outside the range where the model is defined.
class ParameterRangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Gaussian integral whose quadratic form is not positive definite.
class DivergentIntegral : public std::domain_error {
public:
    DivergentIntegral(const std::string& what, std::size_t pivot)
        : std::domain_error(what), pivot_(pivot) {}
    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

// A quantity that must be real carried an imaginary part above tolerance.
class ImaginaryResidueError : public std::runtime_error {
public:
    ImaginaryResidueError(const std::string& what, double residue)
        : std::runtime_error(what), residue_(residue) {}
    double residue() const noexcept { return residue_; }

private:
    double residue_;
};

}  // namespace cvswap
