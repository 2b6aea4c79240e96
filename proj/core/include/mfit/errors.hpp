#ifndef MFIT_ERRORS_HPP
#define MFIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mfit {

// Malformed input document: missing key, wrong type, bad unit tag.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Well-formed document that violates a geometric or referential invariant.
class SemanticError : public std::runtime_error {
public:
    explicit SemanticError(const std::string& msg) : std::runtime_error(msg) {}
};

// Out-of-domain argument to a computation (non-positive length, unphysical spec, ...).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: singular system, solver did not converge at tolerance.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mfit

#endif
