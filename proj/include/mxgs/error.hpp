#pragma once

#include <stdexcept>
#include <string>

namespace mxgs {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied parameters was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed to reach its target.
class ComputeError : public Error {
public:
    using Error::Error;
};

/// The iteration collapsed onto the trivial solution.
class CollapseError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

/// Quadrature failed; carries the error estimate that was achieved.
class QuadratureError : public ComputeError {
public:
    QuadratureError(const std::string& what, double achieved)
        : ComputeError(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
          achieved_error(achieved) {}
    double achieved_error;
};

/// Malformed or unsupported file content.
class FormatError : public Error {
public:
    using Error::Error;
};

class UnsupportedVersionError : public FormatError {
public:
    using FormatError::FormatError;
};

}  // namespace mxgs
