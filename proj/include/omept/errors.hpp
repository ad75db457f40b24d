#pragma once

#include <stdexcept>
#include <string>

namespace omept {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameter or configuration value violates a documented constraint.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Config file could not be parsed; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// Operation requires gamma2 == gammab (within tolerance) but they differ.
class AsymmetricRates : public Error {
public:
    using Error::Error;
};

// Nonzero steady-state branch does not exist below the existence drive.
class BelowExistence : public Error {
public:
    using Error::Error;
};

// Requested steady-state branch has negative intensity at these parameters.
class NegativeIntensity : public Error {
public:
    using Error::Error;
};

// Mode-magnitude classification was asked for the zero vector.
class ZeroVector : public Error {
public:
    using Error::Error;
};

// Integration state exceeded the overflow guard or became non-finite.
class NumericalBlowup : public Error {
public:
    NumericalBlowup(const std::string& what, double time)
        : Error(what + " at t = " + std::to_string(time)), time_(time) {}
    double time() const { return time_; }

private:
    double time_ = 0.0;
};

// Smoothing window shorter than the documented minimum of sample spacings.
class WindowTooShort : public Error {
public:
    using Error::Error;
};

// Smoothed phonon intensity underflowed; symmetry ratio undefined.
class DegeneratePhononIntensity : public Error {
public:
    using Error::Error;
};

// Hysteresis thresholds must satisfy 0 < lo < hi < 1.
class InvalidThresholds : public Error {
public:
    using Error::Error;
};

// Phase record in the fit window is not coherent enough for a slope fit.
class WindowNotCoherent : public Error {
public:
    using Error::Error;
};

}  // namespace omept
