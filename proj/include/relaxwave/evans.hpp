#pragma once

#include <optional>
#include <vector>

#include "relaxwave/profile.hpp"

namespace relaxwave {

// beta roots too close for the closed-form Evans denominators; the caller
// retries with a slightly perturbed lambda
class CoalescentBeta : public Error {
public:
    using Error::Error;
};

class ZeroOnContour : public Error {
public:
    using Error::Error;
};

/// Everything evans() needs from the underlying wave.
struct EvansContext {
    ModelParams params; // resolved threshold a
    CharRoots alphas;   // classification at lambda = 0
    double z1 = 0.0;
    double du0 = 0.0; // u_c'(0) = a alpha3 > 0
    double du1 = 0.0; // u_c'(z1) < 0
    double U0 = 1.0;  // normalization U(0)
};

EvansContext make_evans_context(const WaveProfile& w, double U0 = 1.0);

struct BetaRoots {
    CharRoots roots;
    // Re(b3) > 0 > Re(b1), Re(b2): conjectured persistence monitored per call
    bool pattern_ok = true;
};

/// Roots of W_lambda(beta) labelled by adaptive continuation along the
/// straight path from lambda = 0 (where they coincide with the alpha roots).
BetaRoots beta_roots(const ModelParams& p, Complex lambda);

/// Continuation hop from previously labelled roots at a nearby lambda.
BetaRoots beta_roots_from(const ModelParams& p, Complex lambda, Complex lambda_prev,
                          const CharRoots& prev, bool* ok = nullptr);

struct EvansParts {
    Complex E;
    Complex U_z1;        // transferred perturbation amplitude at z1
    Complex U_z1_scaled; // U(z1) e^{-beta3 z1} (never overflows)
    Complex S2;
    BetaRoots beta;
};

/// Closed-form Evans function
///   E = U0 + (S1 + S2 e^{-b3 z1}) (d + c b3 + lambda) / (c (b1-b3)(b2-b3)).
/// Throws CoalescentBeta when the beta roots nearly coincide.
Complex evans(Complex lambda, const EvansContext& ctx);

/// evans() with the spec'd single retry at lambda + 1e-7 (1+|lambda|).
Complex evans_robust(Complex lambda, const EvansContext& ctx);

/// Evans value plus the intermediate transfer quantities (for oracles).
EvansParts evans_parts(Complex lambda, const EvansContext& ctx);

EvansParts evans_parts_with_roots(Complex lambda, const EvansContext& ctx,
                                  const BetaRoots& beta);

/// Determinant form of the Evans function (first construction); vanishes
/// simultaneously with evans(). Kept for the equivalence spot-check.
Complex evans_det(Complex lambda, const EvansContext& ctx);

struct HalfRingContour {
    double r = 0.1;
    double R = 20.0;
    int n_arc = 1000;
    int n_seg = 1000;
};

struct WindingResult {
    int n_zeros = 0;
    double min_abs_E = 0.0;
    double total_arg = 0.0; // accumulated argument along the boundary
    bool refined = false;   // adaptive bisection kicked in
    bool pattern_ok = true;
    bool consistent = true; // |total/(2 pi) - n_zeros| < 0.05
    double used_r = 0.0, used_R = 0.0;
    std::size_t n_samples = 0;
};

/// Zero count of E inside the half ring by accumulated argument, with
/// adaptive bisection until every step turns by less than pi/4. Samples are
/// evaluated in fixed chunks so serial and parallel runs agree exactly.
WindingResult winding_number(const EvansContext& ctx, const HalfRingContour& contour,
                             bool parallel = true);

struct NyquistSample {
    Complex lambda, E;
};

/// Ordered boundary image with argument steps below pi/8 (plot-ready).
std::vector<NyquistSample> nyquist_path(const EvansContext& ctx,
                                        const HalfRingContour& contour,
                                        bool parallel = true);

/// E on real lambda in (0, lambda_max]; throws NonRealResult if an imaginary
/// residue survives.
std::vector<std::pair<double, double>> real_axis_scan(const EvansContext& ctx,
                                                      double lambda_max, int n);

/// First sign change of E on the positive real axis, bisected; nullopt when
/// E keeps one sign.
std::optional<double> real_axis_zero(const EvansContext& ctx, double lambda_max, int n = 400);

struct LambdaCurves {
    std::vector<double> k;
    // one vector per branch; 3 branches for tau > 0, 2 for tau = 0
    std::vector<std::vector<Complex>> branches;
    double max_residual = 0.0; // max |W_lambda(ik)| over all reported pairs
    bool continuous = true;
};

/// Dispersion curves lambda_j(k) solving W_lambda(ik) = 0, continued in k.
LambdaCurves lambda_curves(const ModelParams& p, std::span<const double> k_grid);

enum class Stability { stable, unstable, inconclusive };

struct VerdictResult {
    Stability verdict = Stability::inconclusive;
    int n_zeros = 0;
    std::vector<WindingResult> ladder;
};

/// Winding numbers over a ladder of contours; stable iff N = 0 everywhere
/// with clean diagnostics, inconclusive when the ladder disagrees or the
/// beta sign pattern broke down.
VerdictResult stability_verdict(const EvansContext& ctx,
                                std::span<const HalfRingContour> ladder = {});

/// Convenience: construct the wave at p and classify it. Throws NoRoot when
/// no localized wave exists at this speed.
VerdictResult stability_verdict(const ModelParams& p,
                                std::span<const HalfRingContour> ladder = {});

const char* to_string(Stability s);

} // namespace relaxwave
