#pragma once

#include <stdexcept>
#include <string>

namespace bioadam {

// Every failure raised by the library derives from Error so the CLI can
// report a one-line diagnostic and exit nonzero.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand dimensions do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Hyperparameters or experiment settings violate their constraints.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A numeric input is outside the domain of the operation (NaN, bad label, ...).
class InputError : public Error {
public:
    using Error::Error;
};

// dt is non-positive or too large for the integrator.
class StepSizeError : public Error {
public:
    using Error::Error;
};

// Object used out of order, e.g. backward() with a cache from another forward.
class StateError : public Error {
public:
    using Error::Error;
};

// Metric undefined for the input (all-zero matrix in an angle).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// Binary file has the wrong magic number or layout.
class FormatError : public Error {
public:
    using Error::Error;
};

// Two files that must agree do not (IDX image/label counts).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bioadam
