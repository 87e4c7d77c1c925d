#pragma once

#include <stdexcept>
#include <string>

namespace bellnl {

/// Input violates a documented precondition (bad quantum numbers, unnormalized data, ...).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A configured size cap (matrix dimension, enumeration count, party count) would be exceeded.
class CapacityError : public std::length_error {
public:
    explicit CapacityError(const std::string& what) : std::length_error(what) {}
};

/// Conditioning on an event of (numerically) zero probability.
class DegenerateConditionError : public std::domain_error {
public:
    explicit DegenerateConditionError(const std::string& what) : std::domain_error(what) {}
};

} // namespace bellnl
