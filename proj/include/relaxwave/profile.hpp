#pragma once

#include <array>

#include "relaxwave/charpoly.hpp"
#include "relaxwave/cubic.hpp"
#include "relaxwave/params.hpp"

namespace relaxwave {

/// Piecewise-exponential solitary wave. The middle and right intervals carry
/// two coefficient sets anchored at z = 0 and z = z1 so that evaluation never
/// forms e^{alpha3 z1} (which overflows when s = e^{-alpha3 z1} is tiny).
struct WaveProfile {
    ModelParams params; // with the resolved threshold a
    CharRoots alphas;
    double s = 0.0;  // e^{-alpha3 z1}, in (0,1)
    double z1 = 0.0; // second threshold crossing

    // coefficient of e^{alpha3 z} X3 on z < 0 (equals a)
    double left = 0.0;
    // middle interval, z-anchored and z1-anchored
    std::array<Complex, 3> mid0{}, mid1{};
    // right interval, z1-anchored; the alpha3 component vanishes by construction
    std::array<Complex, 2> right1{};
    // rest state of the excited (H = 1) kinetics: u = d/(d+b), w = b/(d+b)
    double u_rest = 0.0, w_rest = 0.0;

    double du0 = 0.0;   // u'(0) = a alpha3
    double du1 = 0.0;   // u'(z1) < 0
    double u_max = 0.0; // hump amplitude
};

struct ProfileSample {
    double z, u, du, w;
};

/// u and w together with the derivatives needed by the residual and
/// eigenfunction checks.
struct ProfileJet {
    double u, du, d2u, d3u, w, dw, d2w;
};

enum class ExistenceVerdict { min_branch, max_branch, none };

/// h(s) of the matching construction, evaluated in complex arithmetic; the
/// imaginary residue is checked (< 1e-9) and discarded.
double h_function(double s, const CharRoots& alphas, const ModelParams& p);

/// h as a function of t = ln s; identical values, stable for s near 0.
double h_log(double t, const CharRoots& alphas, const ModelParams& p);

/// Closed-form lim_{s->0+} h(s).
double h_limit_zero(const CharRoots& alphas, const ModelParams& p);

/// Closed-form h''(1).
double h_second_at_one(const CharRoots& alphas, const ModelParams& p);

/// Unique interior root of h on (0,1). Scans ln s over an adaptive range,
/// ignores sub-noise sign flips near s = 1 (where h vanishes quadratically),
/// and throws NoRoot when no root or more than one root is present.
double solve_s(const ModelParams& p);

/// Threshold level a implied by s: a = (1-s) a1 a2 (d + a3 c) /
/// ((a3-a1)(a3-a2)(b+d)). Positive real; throws otherwise.
double threshold_from_s(double s, const CharRoots& alphas, const ModelParams& p);

/// Assemble the piecewise solution at speed p.c. When p.a is set it must
/// agree with the derived threshold to 1e-6 relative; the profile always
/// stores the derived value. Throws NoRoot / AnsatzViolation / DegenerateRoots.
WaveProfile build_profile(const ModelParams& p);

ProfileSample eval_profile(const WaveProfile& w, double z);
ProfileJet eval_jet(const WaveProfile& w, double z);

/// Residuals of the two traveling-wave ODEs at z (not a switch point):
/// (tau c^2 - 1) u'' + c u' + u - H(u-a) + w  and  c w' - b u + d w.
std::array<double, 2> ode_residual(const WaveProfile& w, double z);

/// Executable form of the existence proposition: locate alpha3 relative to
/// sqrt(gamma(d+b)/(c^2 gamma + d)) and sqrt(gamma(d-d^2+2b)/d) through the
/// sign of W there. Requires d > 0 and d - d^2 + 2b > 0.
ExistenceVerdict existence_check(const ModelParams& p);

const char* to_string(ExistenceVerdict v);

} // namespace relaxwave
