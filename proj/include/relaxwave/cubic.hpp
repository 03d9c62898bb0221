#pragma once

#include <array>
#include <complex>

#include "relaxwave/params.hpp"

namespace relaxwave {

using Complex = std::complex<double>;

/// Cubic polynomial c3 x^3 + c2 x^2 + c1 x + c0 (descending degree).
template <typename T>
struct Cubic {
    T c3{}, c2{}, c1{}, c0{};

    template <typename X>
    auto operator()(X x) const {
        return ((c3 * x + c2) * x + c1) * x + c0;
    }

    template <typename X>
    auto derivative(X x) const {
        return (3.0 * c3 * x + 2.0 * c2) * x + c1;
    }

    double max_coeff_mag() const {
        using std::abs;
        double m = abs(c3);
        m = std::max(m, (double)abs(c2));
        m = std::max(m, (double)abs(c1));
        return std::max(m, (double)abs(c0));
    }
};

using RealCubic = Cubic<double>;
using ComplexCubic = Cubic<Complex>;

inline ComplexCubic to_complex(const RealCubic& p) {
    return {Complex(p.c3), Complex(p.c2), Complex(p.c1), Complex(p.c0)};
}

enum class RootPattern {
    real_pair,      // r1 <= r2 real and negative
    conjugate_pair, // r1 = conj(r2), Im(r1) < 0
    continued       // labelled by continuation in lambda, no sign guarantee
};

/// Classified characteristic roots. For the traveling-wave polynomial the
/// third root is the unique positive real one and Re(r1), Re(r2) < 0.
struct CharRoots {
    Complex r1, r2, r3;
    RootPattern pattern = RootPattern::real_pair;

    std::array<Complex, 3> all() const { return {r1, r2, r3}; }
};

/// Roots of a cubic via companion-matrix eigenvalues plus one Newton
/// polishing step. Deterministic ordering: a real positive root (when one
/// exists) goes last; the rest are sorted by (Re, Im).
/// Throws DegenerateRoots for a vanishing leading coefficient and Error if
/// the scaled residual |p(r)| / (max|c_i| * max(1,|r|)^3) exceeds tol.
std::array<Complex, 3> solve_cubic(const ComplexCubic& poly, double residual_tol = 1e-10);
std::array<Complex, 3> solve_cubic(const RealCubic& poly, double residual_tol = 1e-10);

/// Identify the unique positive real root as r3 and check Re < 0 for the
/// others. Throws ClassificationFailure when the sign pattern does not hold.
CharRoots classify_alpha_roots(const std::array<Complex, 3>& roots);

/// Residuals of the three Viete relations for `roots` against `poly`,
/// relative to the magnitude of each relation's terms.
std::array<double, 3> viete_residuals(const std::array<Complex, 3>& roots,
                                      const ComplexCubic& poly);

} // namespace relaxwave
