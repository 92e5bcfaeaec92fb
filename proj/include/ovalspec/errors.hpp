#pragma once

#include <stdexcept>
#include <string>

namespace ovalspec {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Curve data violates the strict convexity requirement min (phi^-1)' > floor.
class RejectNonConvex : public Error {
public:
    RejectNonConvex(double min_derivative, double argmin, double floor)
        : Error("curve is not strictly convex: min (phi^-1)' = " + std::to_string(min_derivative) +
                " at t = " + std::to_string(argmin) + " (floor " + std::to_string(floor) + ")"),
          min_derivative(min_derivative), argmin(argmin) {}
    double min_derivative;
    double argmin;
};

class RejectBadIndex : public Error {
public:
    explicit RejectBadIndex(int n)
        : Error("harmonic index " + std::to_string(n) + " is not allowed (n >= 2 required)"), index(n) {}
    int index;
};

class RejectDuplicateIndex : public Error {
public:
    explicit RejectDuplicateIndex(int n)
        : Error("harmonic index " + std::to_string(n) + " appears more than once"), index(n) {}
    int index;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

/// The computed lowest eigenvector changes sign; the grid is too coarse.
class NodalGroundState : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class ZeroVector : public Error {
public:
    using Error::Error;
};

class ZeroProjection : public Error {
public:
    using Error::Error;
};

class NotApplicable : public Error {
public:
    using Error::Error;
};

/// Malformed or unreadable input file.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace ovalspec
