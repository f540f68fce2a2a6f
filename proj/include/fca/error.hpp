#pragma once

#include <stdexcept>
#include <string>

namespace fca {

// Every error raised by the library derives from Error, so callers that only
// care about "did it work" can catch one type. The CLI maps the subclasses
// onto distinct exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mismatched shapes between operands.
class DimensionError : public Error {
public:
    using Error::Error;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// An operator could not be built, or a built operator failed certification.
class ConstructionError : public Error {
public:
    using Error::Error;
};

// An inner numerical routine (SVD, eigen solver) ran out of sweeps.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// An iterate became non-finite.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t iteration)
        : Error(what), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

// File could not be opened or its content could not be parsed.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace fca
