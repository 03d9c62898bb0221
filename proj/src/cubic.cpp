#include "relaxwave/cubic.hpp"

#include <algorithm>
#include <Eigen/Dense>

namespace relaxwave {

namespace {

bool is_real(const Complex& z, double tol = 1e-9) {
    return std::abs(z.imag()) <= tol * (1.0 + std::abs(z));
}

} // namespace

std::array<Complex, 3> solve_cubic(const ComplexCubic& poly, double residual_tol) {
    const double scale = poly.max_coeff_mag();
    if (std::abs(poly.c3) == 0.0 || std::abs(poly.c3) < 1e-300 * scale)
        throw DegenerateRoots("solve_cubic: leading coefficient is (numerically) zero");

    Eigen::Matrix3cd companion = Eigen::Matrix3cd::Zero();
    companion(0, 2) = -poly.c0 / poly.c3;
    companion(1, 2) = -poly.c1 / poly.c3;
    companion(2, 2) = -poly.c2 / poly.c3;
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;

    Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(companion, /*computeEigenvectors=*/false);
    std::array<Complex, 3> roots{es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};

    // one Newton step; near-multiple roots keep the companion value
    for (Complex& r : roots) {
        const Complex dp = poly.derivative(r);
        if (std::abs(dp) > 1e-14 * scale) {
            const Complex step = poly(r) / dp;
            if (std::abs(step) < 0.5 * (1.0 + std::abs(r)))
                r -= step;
        }
    }

    for (const Complex& r : roots) {
        const double m = std::max(1.0, std::abs(r));
        const double res = std::abs(poly(r)) / (scale * m * m * m);
        if (!(res <= residual_tol))
            throw Error("solve_cubic: root residual " + std::to_string(res) + " exceeds tolerance");
    }

    // deterministic order: one real positive root last (largest if several),
    // the remaining pair by (Re, Im)
    auto lex = [](const Complex& x, const Complex& y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    };
    int pos = -1;
    for (int i = 0; i < 3; ++i)
        if (is_real(roots[i]) && roots[i].real() > 0.0 &&
            (pos < 0 || roots[i].real() > roots[pos].real()))
            pos = i;
    if (pos >= 0)
        std::swap(roots[pos], roots[2]);
    if (lex(roots[1], roots[0]))
        std::swap(roots[0], roots[1]);
    if (pos < 0) {
        // fully lexicographic when no real positive root is present
        if (lex(roots[2], roots[1])) std::swap(roots[1], roots[2]);
        if (lex(roots[1], roots[0])) std::swap(roots[0], roots[1]);
    }
    return roots;
}

std::array<Complex, 3> solve_cubic(const RealCubic& poly, double residual_tol) {
    return solve_cubic(to_complex(poly), residual_tol);
}

CharRoots classify_alpha_roots(const std::array<Complex, 3>& roots) {
    int pos = -1;
    for (int i = 0; i < 3; ++i) {
        if (is_real(roots[i]) && roots[i].real() > 0.0) {
            if (pos >= 0)
                throw ClassificationFailure("more than one positive real root");
            pos = i;
        }
    }
    if (pos < 0)
        throw ClassificationFailure("no positive real root found");

    std::array<Complex, 2> rest;
    int k = 0;
    for (int i = 0; i < 3; ++i)
        if (i != pos) rest[k++] = roots[i];
    for (const Complex& r : rest)
        if (!(r.real() < 0.0))
            throw ClassificationFailure("root with nonnegative real part among r1, r2");

    if (rest[1].real() < rest[0].real() ||
        (rest[1].real() == rest[0].real() && rest[1].imag() < rest[0].imag()))
        std::swap(rest[0], rest[1]);

    CharRoots out;
    out.r1 = rest[0];
    out.r2 = rest[1];
    out.r3 = Complex(roots[pos].real(), 0.0); // exactly real by classification
    out.pattern = is_real(rest[0]) && is_real(rest[1]) ? RootPattern::real_pair
                                                       : RootPattern::conjugate_pair;
    return out;
}

std::array<double, 3> viete_residuals(const std::array<Complex, 3>& roots,
                                      const ComplexCubic& poly) {
    const Complex r1 = roots[0], r2 = roots[1], r3 = roots[2];
    const Complex sum = r1 + r2 + r3;
    const Complex pair = r1 * r2 + r1 * r3 + r2 * r3;
    const Complex prod = r1 * r2 * r3;
    const Complex sum_ref = -poly.c2 / poly.c3;
    const Complex pair_ref = poly.c1 / poly.c3;
    const Complex prod_ref = -poly.c0 / poly.c3;
    auto rel = [](Complex got, Complex ref) {
        return std::abs(got - ref) / std::max(1.0, std::max(std::abs(got), std::abs(ref)));
    };
    return {rel(sum, sum_ref), rel(pair, pair_ref), rel(prod, prod_ref)};
}

} // namespace relaxwave
