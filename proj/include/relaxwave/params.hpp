#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace relaxwave {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

// Root classification did not produce the expected sign pattern.
class ClassificationFailure : public Error {
public:
    using Error::Error;
};

// h(s) has no (unique) interior root: no localized wave at this speed.
class NoRoot : public Error {
public:
    using Error::Error;
};

// A quantity that must be real came out with a non-negligible imaginary part.
class NonRealResult : public Error {
public:
    using Error::Error;
};

// Characteristic roots too close together for the closed-form transfer.
class DegenerateRoots : public Error {
public:
    using Error::Error;
};

// Constructed profile crosses the threshold more than twice.
class AnsatzViolation : public Error {
public:
    using Error::Error;
};

/// Parameter tuple (a, b, c, d, tau) of the relaxing two-component model.
/// The threshold `a` may be left unset (NaN); it is then derived from the
/// transcendental construction at the given speed.
struct ModelParams {
    double a = std::numeric_limits<double>::quiet_NaN();
    double b = 0.5;   // kinetic coupling rate
    double c = 0.0;   // wave speed, > 0
    double d = 0.1;   // kinetic decay rate, >= 0
    double tau = 0.1; // relaxation time, >= 0

    bool has_a() const { return !std::isnan(a); }

    // gamma = 1 / (1 - c^2 tau); recomputed on demand so it can never go stale
    double gamma() const { return 1.0 / (1.0 - c * c * tau); }

    void validate() const {
        if (!(c > 0.0))
            throw InvalidParams("wave speed c must be positive, got " + std::to_string(c));
        if (!(b > 0.0))
            throw InvalidParams("coupling rate b must be positive, got " + std::to_string(b));
        if (!(d >= 0.0))
            throw InvalidParams("decay rate d must be nonnegative, got " + std::to_string(d));
        if (!(tau >= 0.0))
            throw InvalidParams("relaxation time tau must be nonnegative, got " + std::to_string(tau));
        if (!(c * c * tau < 1.0))
            throw InvalidParams("admissibility c^2 tau < 1 violated: c^2 tau = " +
                                std::to_string(c * c * tau));
        if (has_a() && !(a > 0.0))
            throw InvalidParams("threshold a must be positive, got " + std::to_string(a));
    }

    ModelParams with_c(double speed) const {
        ModelParams p = *this;
        p.c = speed;
        return p;
    }
};

} // namespace relaxwave
