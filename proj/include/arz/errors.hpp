#pragma once

#include <stdexcept>
#include <string>

namespace arz {

// Bad input: parameters, configuration, representation mismatches.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical procedure failed: no root, no convergence, NaN, vacuum.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace arz
