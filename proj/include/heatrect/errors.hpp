// errors.hpp: Exception hierarchy shared by the solvers, oracle and CLI

#pragma once

#include <stdexcept>
#include <string>

namespace heatrect {

enum class ErrorKind {
    domain,        // argument outside the mathematical domain (e.g. omega = 0 pole)
    validation,    // physically inconsistent model or parameter
    singular,      // numerically singular linear system
    quadrature,    // adaptive integration did not reach the tolerance
    instability,   // no periodic steady state (parametric resonance)
    unsupported,   // request outside the implemented feature set
    config,        // configuration document could not be parsed
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

struct SingularityError : Error {
    SingularityError(const std::string& what, double condition)
        : Error(ErrorKind::singular, what), condition(condition) {}
    double condition;
};

struct QuadratureError : Error {
    QuadratureError(const std::string& what, double achieved_error)
        : Error(ErrorKind::quadrature, what), achieved_error(achieved_error) {}
    double achieved_error;
};

struct InstabilityError : Error {
    explicit InstabilityError(const std::string& what) : Error(ErrorKind::instability, what) {}
};

struct UnsupportedError : Error {
    explicit UnsupportedError(const std::string& what) : Error(ErrorKind::unsupported, what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::domain: return "domain";
        case ErrorKind::validation: return "validation";
        case ErrorKind::singular: return "singular";
        case ErrorKind::quadrature: return "quadrature";
        case ErrorKind::instability: return "instability";
        case ErrorKind::unsupported: return "unsupported";
        case ErrorKind::config: return "config";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

} // namespace heatrect
