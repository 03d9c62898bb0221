#include "relaxwave/speed_curve.hpp"

#include <algorithm>
#include <cmath>

namespace relaxwave {

std::vector<double> default_c_grid(double tau, int n, double c_min) {
    const double c_max = tau > 0.0 ? 0.999 / std::sqrt(tau) : 10.0;
    std::vector<double> grid(n);
    const double ratio = std::log(c_max / c_min);
    for (int i = 0; i < n; ++i)
        grid[i] = c_min * std::exp(ratio * i / (n - 1));
    return grid;
}

std::optional<CurvePoint> curve_point(double b, double d, double tau, double c) {
    ModelParams p;
    p.a = std::numeric_limits<double>::quiet_NaN();
    p.b = b;
    p.d = d;
    p.tau = tau;
    p.c = c;
    try {
        const CharRoots al = alpha_roots(p);
        const double s = solve_s(p);
        const double a = threshold_from_s(s, al, p);
        return CurvePoint{c, a, s, -std::log(s) / al.r3.real(), al.r3.real()};
    } catch (const Error&) {
        return std::nullopt;
    }
}

SpeedCurve trace_curve(double b, double d, double tau, std::span<const double> c_grid,
                       bool parallel) {
    SpeedCurve curve;
    curve.b = b;
    curve.d = d;
    curve.tau = tau;
    const int n = static_cast<int>(c_grid.size());
    std::vector<std::optional<CurvePoint>> slots(n);

#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (int i = 0; i < n; ++i) slots[i] = curve_point(b, d, tau, c_grid[i]);

    for (int i = 0; i < n; ++i) {
        if (slots[i])
            curve.points.push_back(*slots[i]);
        else
            curve.gaps.push_back(c_grid[i]);
    }
    return curve;
}

namespace {

double a_of_c_or_neg(double b, double d, double tau, double c) {
    const auto pt = curve_point(b, d, tau, c);
    return pt ? pt->a : -1.0;
}

} // namespace

FoldPoint find_fold(SpeedCurve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 3)
        throw Error("find_fold: need at least 3 curve points");
    size_t im = 0;
    for (size_t i = 1; i < pts.size(); ++i)
        if (pts[i].a > pts[im].a) im = i;
    if (im == 0 || im + 1 == pts.size())
        throw Error("find_fold: maximum sits on the traced boundary (monotone curve)");

    // parabolic estimate through the three points around the maximum
    const double x0 = pts[im - 1].c, x1 = pts[im].c, x2 = pts[im + 1].c;
    const double y0 = pts[im - 1].a, y1 = pts[im].a, y2 = pts[im + 1].a;
    const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    double c_est = (std::abs(den) > 0.0) ? x1 - 0.5 * num / den : x1;
    c_est = std::clamp(c_est, x0, x2);

    // golden-section polish on the continuous a(c)
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = x0, hi = x2;
    double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
    double f1 = a_of_c_or_neg(curve.b, curve.d, curve.tau, m1);
    double f2 = a_of_c_or_neg(curve.b, curve.d, curve.tau, m2);
    while (hi - lo > 1e-8) {
        if (f1 < f2) {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + gr * (hi - lo);
            f2 = a_of_c_or_neg(curve.b, curve.d, curve.tau, m2);
        } else {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - gr * (hi - lo);
            f1 = a_of_c_or_neg(curve.b, curve.d, curve.tau, m1);
        }
    }
    FoldPoint fold;
    fold.c_star = 0.5 * (lo + hi);
    fold.a_star = a_of_c_or_neg(curve.b, curve.d, curve.tau, fold.c_star);
    if (fold.a_star < 0.0)
        throw Error("find_fold: construction failed at the refined fold");
    curve.a_star = fold.a_star;
    curve.c_star = fold.c_star;
    return fold;
}

namespace {

// refine a(c) = a on [lo, hi] where a() is monotone; bisection + secant
double refine_branch(double b, double d, double tau, double a, double lo, double hi) {
    double flo = a_of_c_or_neg(b, d, tau, lo) - a;
    double fhi = a_of_c_or_neg(b, d, tau, hi) - a;
    if (flo * fhi > 0.0)
        throw Error("solve_c_for_a: lost bracket");
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = a_of_c_or_neg(b, d, tau, mid) - a;
        if (flo * fm <= 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
        if (std::abs(fm) < 1e-12) return mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

SpeedBranches solve_c_for_a(double a, double b, double d, double tau,
                            std::span<const double> c_grid) {
    if (!(a > 0.0))
        throw InvalidParams("solve_c_for_a: threshold a must be positive");
    std::vector<double> grid_storage;
    if (c_grid.empty()) {
        grid_storage = default_c_grid(tau);
        c_grid = grid_storage;
    }
    SpeedCurve curve = trace_curve(b, d, tau, c_grid);
    const FoldPoint fold = find_fold(curve);

    SpeedBranches out;
    if (a > fold.a_star + 1e-10) {
        out.kind = BranchKind::none;
        return out;
    }
    if (std::abs(a - fold.a_star) < 1e-10) {
        out.kind = BranchKind::merged;
        out.c_s = out.c_f = fold.c_star;
        return out;
    }

    // bracket on each side of the fold from the traced points
    const auto& pts = curve.points;
    std::optional<double> lo_s, lo_f;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const bool left = pts[i + 1].c <= fold.c_star;
        const bool right = pts[i].c >= fold.c_star;
        if (left && (pts[i].a - a) * (pts[i + 1].a - a) <= 0.0 && !lo_s)
            lo_s = refine_branch(b, d, tau, a, pts[i].c, pts[i + 1].c);
        if (right && (pts[i].a - a) * (pts[i + 1].a - a) <= 0.0 && !lo_f)
            lo_f = refine_branch(b, d, tau, a, pts[i].c, pts[i + 1].c);
    }
    // the fold interval itself can hold a bracket endpoint
    if (!lo_s) {
        auto it = std::find_if(pts.begin(), pts.end(),
                               [&](const CurvePoint& q) { return q.c > fold.c_star; });
        if (it != pts.begin() && it != pts.end() && (it - 1)->a <= a)
            lo_s = refine_branch(b, d, tau, a, (it - 1)->c, fold.c_star);
    }
    if (!lo_f) {
        auto it = std::find_if(pts.begin(), pts.end(),
                               [&](const CurvePoint& q) { return q.c > fold.c_star; });
        if (it != pts.end() && it->a <= a)
            lo_f = refine_branch(b, d, tau, a, fold.c_star, it->c);
    }
    if (!lo_s || !lo_f) {
        out.kind = BranchKind::none;
        return out;
    }
    out.kind = BranchKind::two;
    out.c_s = *lo_s;
    out.c_f = *lo_f;
    return out;
}

} // namespace relaxwave
