#pragma once

#include <stdexcept>
#include <string>

namespace energylab {

// Argument outside its documented domain (bad beta range, step count, alpha_bar bound...).
class InvalidRange : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A schedule kind that needs a steepness parameter was evaluated without one.
class MissingParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-finite values or degenerate solver steps during sampling.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace energylab
