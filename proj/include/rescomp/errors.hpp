#pragma once

#include <stdexcept>
#include <string>

namespace rescomp {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration (bad grid, bad parameter block, unknown key).
struct ConfigError : Error {
    using Error::Error;
};

/// Invalid argument to an operation (mismatched grids, out-of-range delay).
struct ArgumentError : Error {
    using Error::Error;
};

/// Numerical failure (singular solve, eigensolver breakdown), with context.
struct NumericalError : Error {
    using Error::Error;
};

/// Filesystem / serialization failure.
struct IoError : Error {
    using Error::Error;
};

/// Capacity is undefined because the target has zero power on the window.
struct UndefinedCapacityError : Error {
    using Error::Error;
};

}  // namespace rescomp
