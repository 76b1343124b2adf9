#ifndef QFACTOR_ERROR_HPP
#define QFACTOR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace qfactor {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or inconsistent input parameters (bad q, empty lattice, gamma
// constraint violations, malformed configs).
struct ParamError : Error {
    explicit ParamError(const std::string& msg) : Error(msg) {}
};

// A numeric operation left its domain: negative radicand, vanishing
// denominator, non-finite intermediate value. The message names the offending
// lattice point when one is known.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// A square root was asked for a negative radicand; the nonnegative branch is
// the only one supported, complex continuation is never attempted.
struct SqrtDomainError : DomainError {
    explicit SqrtDomainError(const std::string& msg) : DomainError(msg) {}
};

// An iterative construction (infinite product, tail sum) hit its term cap
// before meeting the termination threshold.
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

// Parameters do not select any supported ground state shape.
struct RegimeError : Error {
    explicit RegimeError(const std::string& msg) : Error(msg) {}
};

} // namespace qfactor

#endif
