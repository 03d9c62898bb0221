#include "relaxwave/charpoly.hpp"

namespace relaxwave {

RealCubic char_poly_alpha(const ModelParams& p) {
    p.validate();
    const double g = p.gamma();
    return {p.c, p.d - p.c * p.c * g, -p.c * g * (1.0 + p.d), -g * (p.d + p.b)};
}

ComplexCubic char_poly_beta(const ModelParams& p, Complex lambda) {
    p.validate();
    const double g = p.gamma();
    const double c = p.c, d = p.d, tau = p.tau;
    return {Complex(c),
            lambda + d - c * c * g * (1.0 + 2.0 * lambda * tau),
            -c * g * (1.0 + d + 2.0 * d * tau * lambda + 3.0 * lambda * lambda * tau + 2.0 * lambda),
            -g * (tau * lambda * lambda + lambda + 1.0) * (lambda + d) - p.b * g};
}

ComplexCubic lambda_poly(const ModelParams& p, Complex beta) {
    p.validate();
    const double g = p.gamma();
    const double c = p.c, d = p.d, tau = p.tau;
    const Complex w0 = to_complex(char_poly_alpha(p))(beta);
    return {Complex(-g * tau),
            -g * (3.0 * c * tau * beta + 1.0 + d * tau),
            (1.0 - 2.0 * c * c * g * tau) * beta * beta - 2.0 * c * g * (1.0 + d * tau) * beta -
                g * (1.0 + d),
            w0};
}

CharRoots alpha_roots(const ModelParams& p) {
    return classify_alpha_roots(solve_cubic(char_poly_alpha(p)));
}

} // namespace relaxwave
