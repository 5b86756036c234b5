#pragma once

#include <stdexcept>
#include <string>

namespace hybrid {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside an operation's documented domain.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Bad configuration, database entry or unknown name. CLI exit code 1.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Integrator or quadrature gave up. CLI exit code 3.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double estimate = 0.0, double error_bound = 0.0)
        : Error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const { return estimate_; }
    double error_bound() const { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw PreconditionError(msg);
}

}  // namespace hybrid
