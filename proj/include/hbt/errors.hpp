#pragma once

#include <stdexcept>
#include <string>

namespace hbt {

// Base of every error the library raises. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input outside the physical or numerical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Pair geometry for which the pair momentum vanishes or the frame is undefined.
class DegenerateGeometryError : public DomainError {
public:
    using DomainError::DomainError;
};

// A configuration the formulas do not cover (e.g. unequal filter widths).
class UnsupportedConfigurationError : public DomainError {
public:
    using DomainError::DomainError;
};

// Quadrature or iteration failed to reach its accuracy target.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Correction terms overwhelm the geometric radii; the Gaussian
// parametrization is no longer meaningful.
class ApproximationBreakdownError : public Error {
public:
    using Error::Error;
};

// Scan data carries no measurable fall-off.
class UnfittableError : public Error {
public:
    using Error::Error;
};

// Malformed configuration. Carries the offending key and source line when known.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::string key = {}, int line = 0)
        : Error(format(what, key, line)), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& what, const std::string& key, int line) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!key.empty()) out += "key '" + key + "': ";
        return out + what;
    }

    std::string key_;
    int line_ = 0;
};

}  // namespace hbt
