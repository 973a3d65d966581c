#pragma once

#include <stdexcept>
#include <string>

namespace thermoctl {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes, so new error kinds must derive from one of the classes below.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input violates a type invariant or an operation precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Input is valid but outside the modelled regime (e.g. a coherent state fed
// to a classical Gibbs-preserving map).
class ScopeError : public Error {
public:
    using Error::Error;
};

// A protocol step leaves the admissible Hamiltonian family.
class ConstraintError : public Error {
public:
    using Error::Error;
};

// No evaluator exists for the requested family/orbit combination.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Internal numerical failure that should be impossible for valid inputs.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace thermoctl
