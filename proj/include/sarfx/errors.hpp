#pragma once

#include <stdexcept>
#include <string>

namespace sarfx {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed file header, truncated payload, non-finite values.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Shapes that must agree do not.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Invalid argument or violated type invariant.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input carries no usable information (zero variance, all-zero spectrum, single-class mask).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Iterative least-squares solver stopped without converging.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace sarfx
