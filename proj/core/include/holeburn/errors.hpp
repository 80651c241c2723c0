#pragma once

#include <stdexcept>
#include <string>

namespace holeburn {

// Bad parameters, malformed files, precondition violations.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// A refinement or iteration cap was hit before the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A fit ran but produced an unusable result (nonpositive width, degenerate data...).
class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace holeburn
