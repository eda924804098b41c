#pragma once

#include <stdexcept>
#include <string>

namespace rtk {

/// Base class of every error thrown by the toolkit.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An ellipse/filter specification with out-of-range parameters.
struct InvalidSpecError : Error {
    using Error::Error;
};

/// Grid too coarse to hold the requested structure.
struct GridTooCoarseError : Error {
    using Error::Error;
};

/// Operands live on different grids / have different shapes.
struct DimensionMismatchError : Error {
    using Error::Error;
};

/// Temporal axis too short for the requested stencil.
struct TooFewSamplesError : Error {
    using Error::Error;
};

/// Scalar parameter outside its admissible range.
struct InvalidParameterError : Error {
    using Error::Error;
};

/// Non-finite values appeared during an iterative solve.
struct DivergenceError : Error {
    using Error::Error;
};

/// Reference image unusable for a metric (e.g. zero peak).
struct InvalidReferenceError : Error {
    using Error::Error;
};

/// Malformed or inconsistent run configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// Generic file system / stream failure.
struct IoError : Error {
    using Error::Error;
};

/// File does not start with the RTKD magic.
struct NotRtkdError : Error {
    using Error::Error;
};

/// RTKD header/payload inconsistent or truncated.
struct CorruptFileError : Error {
    using Error::Error;
};

/// RTKD dtype other than 64-bit float.
struct UnsupportedDtypeError : Error {
    using Error::Error;
};

}  // namespace rtk
