#pragma once

#include <stdexcept>
#include <string>

namespace pcs {

// Error taxonomy shared by the whole library. The C API maps each class to a
// distinct status code, and the CLI maps statuses to exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Malformed input files, bad labels, out-of-range tokens.
struct DataError : Error {
    using Error::Error;
};

// Dimension mismatches between tensors.
struct ShapeError : Error {
    using Error::Error;
};

// NaN/Inf where a finite value is required.
struct NumericError : Error {
    using Error::Error;
};

struct TrainingError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

inline const char* version_string() { return "pcs 0.1.0"; }

}  // namespace pcs
