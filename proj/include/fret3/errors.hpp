#pragma once

#include <stdexcept>
#include <string>

namespace fret3 {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An (l, j) series is missing from the species data.
struct UnknownSeriesError : Error {
    using Error::Error;
};

/// A dipole operation was asked for a pair of states with |dl| != 1.
struct SelectionRuleError : Error {
    using Error::Error;
};

/// Field outside the quadratic Stark regime.
struct OutOfRegimeError : Error {
    using Error::Error;
};

struct InvalidPairError : Error {
    using Error::Error;
};

struct EmptyBasisError : Error {
    using Error::Error;
};

struct NonPsdError : Error {
    using Error::Error;
};

/// Bad user input: configuration files, data files, quantum numbers.
struct ValidationError : Error {
    using Error::Error;
};

/// An integrator or root finder could not meet its error contract.
struct NumericalError : Error {
    using Error::Error;
};

}  // namespace fret3
