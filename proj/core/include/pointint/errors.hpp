#pragma once

#include <stdexcept>
#include <string>

namespace pointint {

// Root of the library's exception hierarchy. Every failure a caller can act on
// derives from this type so the command line front end can map it to an exit
// code without inspecting messages.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (point outside the
// model, nonpositive scale, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Requested accuracy cannot be certified with the available cutoff or grid.
class PrecisionError : public Error {
public:
    using Error::Error;
};

// Energy too close to an unperturbed eigenvalue carrying nonzero weight.
class PoleProximityError : public Error {
public:
    using Error::Error;
};

// Energy too close to a perturbed eigenvalue (resolvent denominator vanishes).
class NearEigenvalueError : public Error {
public:
    using Error::Error;
};

// The tail bound needs the first dropped level well above the evaluation energy.
class MarginError : public Error {
public:
    using Error::Error;
};

// Enumeration would exceed the configured maximum number of modes.
class ResourceError : public Error {
public:
    using Error::Error;
};

// Green's function requested on the diagonal where it diverges (D >= 2).
class DivergenceError : public Error {
public:
    using Error::Error;
};

// A theorem-backed expectation failed numerically (e.g. no sign change inside
// an interlacing bracket). Carries diagnostics in the message.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& field, int line, const std::string& what)
        : Error(format(field, line, what)), field_(field), line_(line) {}

    const std::string& field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    static std::string format(const std::string& field, int line, const std::string& what) {
        std::string msg = "config";
        if (line > 0) msg += ":" + std::to_string(line);
        msg += ": field '" + field + "': " + what;
        return msg;
    }

    std::string field_;
    int line_;
};

}  // namespace pointint
