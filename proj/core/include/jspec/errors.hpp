#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace jspec {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: model invariants violated, malformed config, parameter out of range.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Evaluation of a Borel transform exactly at an atom of the measure.
class PoleError : public Error {
public:
    using Error::Error;
};

/// Two routes (or two depths) disagree beyond tolerance; carries both values.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::complex<double> first,
                     std::complex<double> second)
        : Error(what), first_value(first), second_value(second) {}
    std::complex<double> first_value;
    std::complex<double> second_value;
};

/// An eigensolve or a normalization failed its residual check.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Matrix too ill-conditioned to invert reliably.
class ConditioningError : public Error {
public:
    using Error::Error;
};

/// A Radon-Nikodym ratio requested at a point carrying no mass.
class UndefinedPointError : public Error {
public:
    using Error::Error;
};

} // namespace jspec
