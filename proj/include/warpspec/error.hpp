#pragma once

#include <stdexcept>
#include <string>

namespace warpspec {

/// Bad input: parameters outside an operation's domain, malformed configs.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to deliver its postcondition
/// (step budget exhausted, bracket not found, conjugate point, ...).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw InvalidArgument(what);
}

} // namespace detail
} // namespace warpspec
