#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace voltra {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed arguments: bad grid sizes, non-increasing symbols, bad exponents.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

// Two objects that must live on the same grid do not.
class GridMismatchError : public Error {
public:
    using Error::Error;
};

// A function handed to the library produced a non-finite value or threw.
class SamplingError : public Error {
public:
    using Error::Error;
};

// Division by a vanishing or near-vanishing symbol increment.
class SingularDivisionError : public Error {
public:
    using Error::Error;
};

// An iteration hit its cap before reaching the requested tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last)
        : Error(what), last_estimate(last) {}
    double last_estimate;
};

// The successive-approximation series grew instead of decaying.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what,
                    std::vector<double> norms, std::vector<double> rs)
        : Error(what), term_norms(std::move(norms)), ratios(std::move(rs)) {}
    std::vector<double> term_norms;
    std::vector<double> ratios;
};

// Inverting I + K failed or the two inversion routes disagree.
class InversionError : public Error {
public:
    using Error::Error;
};

// A computation produced non-finite intermediates (matrix exponential of a
// badly scaled generator, runaway series).
class OverflowError : public Error {
public:
    using Error::Error;
};

// Scenario configuration is malformed, incomplete, or has unknown keys.
class ConfigError : public Error {
public:
    using Error::Error;
};

// File level problems: unreadable paths, malformed CSV, wrong shapes.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace voltra
