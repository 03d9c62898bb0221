#pragma once

#include "relaxwave/cubic.hpp"
#include "relaxwave/params.hpp"

namespace relaxwave {

/// Characteristic polynomial W(alpha) of the traveling-wave first-order
/// system: c a^3 + (d - c^2 g) a^2 - c g (1+d) a - g (d+b), g = gamma.
RealCubic char_poly_alpha(const ModelParams& p);

/// Characteristic polynomial W_lambda(beta) of the linearized (eigenvalue)
/// system; coincides with char_poly_alpha at lambda = 0.
ComplexCubic char_poly_beta(const ModelParams& p, Complex lambda);

/// W_lambda(beta) = 0 reorganized as a cubic in lambda for fixed beta; used
/// to trace the curves lambda_j(k) with beta = i k. The leading coefficient
/// is -gamma*tau, so the cubic degenerates to a quadratic at tau = 0.
ComplexCubic lambda_poly(const ModelParams& p, Complex beta);

/// Solve + classify the alpha roots for valid params.
CharRoots alpha_roots(const ModelParams& p);

} // namespace relaxwave
