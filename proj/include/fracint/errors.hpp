#pragma once

#include <stdexcept>
#include <string>

namespace fracint {

// Invalid arguments to a library operation (bad exponent, n < 2, ...).
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// A space or file failed one of the structural checks (symmetry, identity, positive masses).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// An internal inequality that must hold by construction did not.
class InvariantViolation : public std::logic_error {
public:
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

void require(bool condition, const std::string& message);

}  // namespace fracint
