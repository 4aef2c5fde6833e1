#pragma once

#include <stdexcept>
#include <string>

namespace cnnspeed {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (e.g. mu <= 0 for Phi).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A transcendental evaluation left the representable exponent range.
class OutOfRangeError : public Error {
public:
    using Error::Error;
};

/// The template does not satisfy the monostability hypothesis
/// (alpha + beta > 0 and alpha + a + beta > 1), or a limiting-case path
/// violates its structural assumptions.
class HypothesisError : public Error {
public:
    using Error::Error;
};

/// Closed-form and numeric results disagree beyond tolerance.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Simulation configuration rejected before any stepping.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The integrator produced a non-finite value.
class BlowUpError : public Error {
public:
    using Error::Error;
};

/// Not enough tracked front positions to fit a speed.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

} // namespace cnnspeed
