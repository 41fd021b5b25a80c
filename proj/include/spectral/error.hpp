#pragma once

#include <stdexcept>
#include <string>

namespace spectral {

/// Raised when an argument falls outside an operation's domain (even modulus,
/// composite where a prime is required, bound too small, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised when two independent routes to the same answer disagree. Seeing this
/// means a bug in a filter or in the cycle oracle.
class InconsistencyError : public std::logic_error {
public:
    explicit InconsistencyError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace spectral
