#pragma once

#include <stdexcept>
#include <string>

namespace ccfv {

/// Invalid or inconsistent configuration (bad file, bad value, bad mesh parameters).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical procedure failed (solver divergence, instability, NaN input).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The discrete problem is singular (e.g. zero absorption and zero boundary transfer).
class DegenerateProblemError : public NumericalError {
public:
    explicit DegenerateProblemError(const std::string& msg) : NumericalError(msg) {}
};

/// A time step exceeding the stability bound was requested.
class StabilityError : public NumericalError {
public:
    explicit StabilityError(const std::string& msg) : NumericalError(msg) {}
};

/// Filesystem failure while writing results.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ccfv
