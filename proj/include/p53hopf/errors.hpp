#pragma once

#include <stdexcept>
#include <string>

namespace p53hopf {

/// Argument outside the mathematical domain of an operation (negative
/// concentration passed to the Hill function, invalid parameter set, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Iteration failed to converge, a linear system was near-singular, a Hopf
/// point is degenerate, or an integration diverged.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by its inputs.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace p53hopf
