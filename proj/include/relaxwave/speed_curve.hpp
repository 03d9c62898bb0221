#pragma once

#include <optional>
#include <span>
#include <vector>

#include "relaxwave/profile.hpp"

namespace relaxwave {

struct CurvePoint {
    double c, a, s, z1, alpha3;
};

/// Speed curve a(c) for fixed (b, d, tau). Gaps record grid speeds at which
/// the construction reports no localized wave.
struct SpeedCurve {
    double b = 0, d = 0, tau = 0;
    std::vector<CurvePoint> points;
    std::vector<double> gaps;
    double a_star = std::numeric_limits<double>::quiet_NaN();
    double c_star = std::numeric_limits<double>::quiet_NaN();
};

struct FoldPoint {
    double a_star, c_star;
};

enum class BranchKind { two, merged, none };

struct SpeedBranches {
    BranchKind kind = BranchKind::none;
    double c_s = std::numeric_limits<double>::quiet_NaN();
    double c_f = std::numeric_limits<double>::quiet_NaN();
};

/// 400 log-spaced speeds on (0.01, 0.999/sqrt(tau)); the upper end defaults
/// to 10 when tau = 0.
std::vector<double> default_c_grid(double tau, int n = 400, double c_min = 0.01);

/// Solve the construction at every grid speed. Points are independent and
/// evaluated with OpenMP when `parallel`; assembly preserves grid order, so
/// serial and parallel runs produce identical curves.
SpeedCurve trace_curve(double b, double d, double tau, std::span<const double> c_grid,
                       bool parallel = true);

/// One curve point (exposed for re-solves and bisection).
std::optional<CurvePoint> curve_point(double b, double d, double tau, double c);

/// Fold of a(c): parabolic fit through the discrete maximum refined by
/// golden-section search; stores (a*, c*) into the curve. Throws Error when
/// the maximum sits on the traced boundary (monotone curve).
FoldPoint find_fold(SpeedCurve& curve);

/// Both speeds with threshold a, straddling the fold: c_s < c* < c_f.
/// |a - a*| < 1e-10 reports the merged pair; a > a* reports none.
SpeedBranches solve_c_for_a(double a, double b, double d, double tau,
                            std::span<const double> c_grid = {});

} // namespace relaxwave
