#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jdweak {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or inconsistent input (bad tolerance, unsorted mesh, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A model callback produced an invalid value (non-finite coefficient,
/// negative intensity).
class ModelError : public Error {
public:
    using Error::Error;
};

/// Numerical failure inside a routine (non-monotone quadrature, failed root
/// bracketing).
class NumericError : public Error {
public:
    using Error::Error;
};

/// The model does not provide derivatives of the requested order.
class CapabilityError : public Error {
public:
    using Error::Error;
};

/// The Euler path produced a non-finite state.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t step)
        : Error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Brownian bridge refinement would go below the minimum step floor.
class RefinementDepthError : public Error {
public:
    using Error::Error;
};

/// An adaptive loop hit its iteration or batch cap.
class NonConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace jdweak
