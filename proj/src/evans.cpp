#include "relaxwave/evans.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace relaxwave {

namespace {

constexpr double kPi = std::numbers::pi;

std::array<Complex, 3> as_array(const CharRoots& r) { return {r.r1, r.r2, r.r3}; }

CharRoots as_roots(const std::array<Complex, 3>& a) {
    return {a[0], a[1], a[2], RootPattern::continued};
}

bool pattern_holds(const std::array<Complex, 3>& b) {
    return b[2].real() > 0.0 && b[0].real() < 0.0 && b[1].real() < 0.0;
}

double min_gap(const std::array<Complex, 3>& b) {
    return std::min({std::abs(b[0] - b[1]), std::abs(b[0] - b[2]), std::abs(b[1] - b[2])});
}

// match `roots` against `prev` by least total displacement over the six
// permutations; returns the matched arrangement and the largest single move
std::array<Complex, 3> best_match(const std::array<Complex, 3>& prev,
                                  const std::array<Complex, 3>& roots, double& max_move) {
    static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                        {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    double best = std::numeric_limits<double>::infinity();
    int bi = 0;
    for (int k = 0; k < 6; ++k) {
        const double tot = std::abs(prev[0] - roots[perms[k][0]]) +
                           std::abs(prev[1] - roots[perms[k][1]]) +
                           std::abs(prev[2] - roots[perms[k][2]]);
        if (tot < best) {
            best = tot;
            bi = k;
        }
    }
    std::array<Complex, 3> out{roots[perms[bi][0]], roots[perms[bi][1]], roots[perms[bi][2]]};
    max_move = std::max({std::abs(out[0] - prev[0]), std::abs(out[1] - prev[1]),
                         std::abs(out[2] - prev[2])});
    return out;
}

// adaptive continuation of the labelled roots along a straight lambda path
std::array<Complex, 3> continue_roots(const ModelParams& p, Complex from, Complex to,
                                      const std::array<Complex, 3>& at_from, bool& ok) {
    if (from == to) return at_from;
    std::array<Complex, 3> cur = at_from;
    double t = 0.0, dt = 1.0;
    constexpr double dt_min = 1.0 / 4096.0;
    int guard = 0;
    while (t < 1.0 && ++guard < 100000) {
        dt = std::min(dt, 1.0 - t);
        const Complex lam = from + (to - from) * (t + dt);
        const auto roots = solve_cubic(char_poly_beta(p, lam));
        double move = 0.0;
        const auto matched = best_match(cur, roots, move);
        const double gap = min_gap(cur);
        const double scale = 1.0 + std::abs(matched[2]);
        if (move <= 0.45 * gap + 1e-9 * scale || dt <= dt_min) {
            if (dt <= dt_min && move > 0.45 * gap + 1e-9 * scale) ok = false;
            cur = matched;
            t += dt;
            dt *= 1.7;
        } else {
            dt *= 0.5;
        }
    }
    return cur;
}

} // namespace

EvansContext make_evans_context(const WaveProfile& w, double U0) {
    if (U0 == 0.0) throw InvalidParams("U0 must be nonzero");
    return {w.params, w.alphas, w.z1, w.du0, w.du1, U0};
}

BetaRoots beta_roots(const ModelParams& p, Complex lambda) {
    const CharRoots al = alpha_roots(p);
    bool ok = true;
    const auto b = continue_roots(p, Complex(0.0), lambda, as_array(al), ok);
    return {as_roots(b), ok && pattern_holds(b)};
}

BetaRoots beta_roots_from(const ModelParams& p, Complex lambda, Complex lambda_prev,
                          const CharRoots& prev, bool* ok_out) {
    bool ok = true;
    const auto b = continue_roots(p, lambda_prev, lambda, as_array(prev), ok);
    if (ok_out) *ok_out = ok;
    return {as_roots(b), ok && pattern_holds(b)};
}

EvansParts evans_parts_with_roots(Complex lambda, const EvansContext& ctx,
                                  const BetaRoots& beta) {
    const ModelParams& p = ctx.params;
    const Complex b1 = beta.roots.r1, b2 = beta.roots.r2, b3 = beta.roots.r3;
    const double scale = 1.0 + std::max({std::abs(b1), std::abs(b2), std::abs(b3)});
    if (min_gap({b1, b2, b3}) < 1e-9 * scale)
        throw CoalescentBeta("beta roots coalesce near lambda = (" +
                             std::to_string(lambda.real()) + ", " +
                             std::to_string(lambda.imag()) + ")");

    const double g = p.gamma();
    const Complex S1 = -ctx.U0 * g / ctx.du0;
    const Complex p1 = p.c * b1 + p.d + lambda;
    const Complex p2 = p.c * b2 + p.d + lambda;
    const Complex p3 = p.c * b3 + p.d + lambda;

    // coefficients of the jump-adjusted left solution in the beta basis
    const Complex g1 = S1 * p1 / (p.c * (b1 - b2) * (b1 - b3));
    const Complex g2 = S1 * p2 / (p.c * (b2 - b1) * (b2 - b3));
    const Complex g3 = ctx.U0 + S1 * p3 / (p.c * (b3 - b1) * (b3 - b2));

    // U(z1) e^{-b3 z1}: the shifted exponentials decay whenever the sign
    // pattern holds, so no overflow on large contours
    const Complex T =
        g1 * std::exp((b1 - b3) * ctx.z1) + g2 * std::exp((b2 - b3) * ctx.z1) + g3;

    EvansParts parts;
    parts.beta = beta;
    parts.U_z1_scaled = T;
    parts.U_z1 = T * std::exp(b3 * ctx.z1);
    parts.S2 = parts.U_z1 * g / ctx.du1;
    parts.E = ctx.U0 + (S1 + g * T / ctx.du1) * (p.d + p.c * b3 + lambda) /
                           (p.c * (b1 - b3) * (b2 - b3));
    return parts;
}

EvansParts evans_parts(Complex lambda, const EvansContext& ctx) {
    return evans_parts_with_roots(lambda, ctx, beta_roots(ctx.params, lambda));
}

Complex evans(Complex lambda, const EvansContext& ctx) {
    return evans_parts(lambda, ctx).E;
}

Complex evans_robust(Complex lambda, const EvansContext& ctx) {
    try {
        return evans(lambda, ctx);
    } catch (const CoalescentBeta&) {
        return evans(lambda + 1e-7 * (1.0 + std::abs(lambda)), ctx);
    }
}

Complex evans_det(Complex lambda, const EvansContext& ctx) {
    const ModelParams& p = ctx.params;
    const BetaRoots beta = beta_roots(p, lambda);
    const auto b = as_array(beta.roots);
    const double g = p.gamma();

    auto Y = [&](int j) {
        Eigen::Vector3cd y;
        y << b[j], Complex(1.0), p.b / (b[j] * p.c + p.d + lambda);
        return y;
    };
    Eigen::Matrix3cd M0;
    M0.col(0) = Y(0);
    M0.col(1) = Y(1);
    M0.col(2) = Y(2);

    // J^-(z1): left decaying solution pushed through the z = 0 jump
    Eigen::Vector3cd v0 = ctx.U0 * Y(2);
    v0(0) += -ctx.U0 * g / ctx.du0;
    const Eigen::Vector3cd coef = M0.fullPivLu().solve(v0);
    Eigen::Vector3cd jm = Eigen::Vector3cd::Zero();
    for (int j = 0; j < 3; ++j) jm += coef(j) * std::exp(b[j] * ctx.z1) * Y(j);

    // columns J^+_{1,2}(z1) = B Y_{1,2}(z1) with the z = z1 jump
    Eigen::Matrix3cd D;
    D.col(0) = jm;
    for (int j = 0; j < 2; ++j) {
        Eigen::Vector3cd yp = std::exp(b[j] * ctx.z1) * Y(j);
        yp(0) += -yp(1) * g / ctx.du1;
        D.col(j + 1) = yp;
    }
    return D.determinant();
}

// ---------------------------------------------------------------------------
// contours

namespace {

struct ContourPoint {
    int piece;   // 0 big arc, 1 upper segment, 2 small arc, 3 lower segment
    double t;    // parameter in [0, 1) within the piece
    Complex lambda;
    Complex E;
    CharRoots beta;
    bool pattern_ok = true;
};

Complex contour_lambda(const HalfRingContour& c, int piece, double t) {
    switch (piece) {
        case 0: // -iR -> +iR through +R, counterclockwise
            return c.R * std::exp(Complex(0.0, kPi * (t - 0.5)));
        case 1: // iR -> ir
            return Complex(0.0, c.R + (c.r - c.R) * t);
        case 2: // ir -> -ir through +r (clockwise around the origin)
            return c.r * std::exp(Complex(0.0, kPi * (0.5 - t)));
        default: // -ir -> -iR
            return Complex(0.0, -(c.r + (c.R - c.r) * t));
    }
}

// evaluate one point, with labelled roots continued from a nearby anchor
void eval_point(const EvansContext& ctx, const HalfRingContour& cont, ContourPoint& pt,
                Complex anchor_lambda, const CharRoots& anchor_roots) {
    pt.lambda = contour_lambda(cont, pt.piece, pt.t);
    bool ok = true;
    BetaRoots beta = beta_roots_from(ctx.params, pt.lambda, anchor_lambda, anchor_roots, &ok);
    for (int attempt = 0;; ++attempt) {
        try {
            const EvansParts parts = evans_parts_with_roots(pt.lambda, ctx, beta);
            pt.E = parts.E;
            break;
        } catch (const CoalescentBeta&) {
            if (attempt >= 1) throw;
            const Complex nudged = pt.lambda + 1e-7 * (1.0 + std::abs(pt.lambda));
            beta = beta_roots_from(ctx.params, nudged, anchor_lambda, anchor_roots, &ok);
            pt.lambda = nudged;
        }
    }
    pt.beta = beta.roots;
    pt.pattern_ok = beta.pattern_ok;
}

std::vector<ContourPoint> initial_samples(const EvansContext& ctx,
                                          const HalfRingContour& cont, bool parallel) {
    std::vector<ContourPoint> pts;
    for (int piece = 0; piece < 4; ++piece) {
        const int n = (piece % 2 == 0) ? cont.n_arc : cont.n_seg;
        for (int i = 0; i < n; ++i)
            pts.push_back({piece, double(i) / n, Complex(), Complex(), CharRoots{}, true});
    }
    const int total = static_cast<int>(pts.size());

    // fixed 64-chunk layout keeps results identical for any thread count
    const int n_chunks = 64;
    const int chunk = (total + n_chunks - 1) / n_chunks;

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int kc = 0; kc < n_chunks; ++kc) {
        const int lo = kc * chunk;
        const int hi = std::min(total, lo + chunk);
        if (lo >= hi) continue;
        Complex anchor(0.0);
        CharRoots roots = ctx.alphas;
        for (int i = lo; i < hi; ++i) {
            eval_point(ctx, cont, pts[i], anchor, roots);
            anchor = pts[i].lambda;
            roots = pts[i].beta;
        }
    }
    return pts;
}

double arg_step(const Complex& a, const Complex& b) { return std::arg(b / a); }

// insert midpoints until consecutive argument steps sit below max_step
void refine(const EvansContext& ctx, const HalfRingContour& cont,
            std::vector<ContourPoint>& pts, double max_step, bool parallel, bool& refined) {
    constexpr int max_rounds = 48;
    constexpr std::size_t max_samples = 1u << 21;
    for (int round = 0; round < max_rounds && pts.size() < max_samples; ++round) {
        std::vector<ContourPoint> mids;
        std::vector<std::size_t> at; // insert position: after pts[at[k]]
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const ContourPoint& a = pts[i];
            const ContourPoint& b = pts[(i + 1) % pts.size()];
            if (std::abs(arg_step(a.E, b.E)) <= max_step) continue;
            ContourPoint m;
            if (a.piece == b.piece && a.t < b.t)
                m = {a.piece, 0.5 * (a.t + b.t), Complex(), Complex(), CharRoots{}, true};
            else // crossing a corner (or the closing edge): extend piece a
                m = {a.piece, 0.5 * (a.t + 1.0), Complex(), Complex(), CharRoots{}, true};
            mids.push_back(m);
            at.push_back(i);
        }
        if (mids.empty()) return;
        refined = true;
        const int nm = static_cast<int>(mids.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
        for (int k = 0; k < nm; ++k)
            eval_point(ctx, cont, mids[k], pts[at[k]].lambda, pts[at[k]].beta);

        std::vector<ContourPoint> merged;
        merged.reserve(pts.size() + mids.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            merged.push_back(pts[i]);
            if (k < at.size() && at[k] == i) merged.push_back(mids[k++]);
        }
        pts.swap(merged);
    }
}

WindingResult winding_on(const EvansContext& ctx, const HalfRingContour& cont,
                         bool parallel) {
    std::vector<ContourPoint> pts = initial_samples(ctx, cont, parallel);
    WindingResult res;
    res.used_r = cont.r;
    res.used_R = cont.R;
    refine(ctx, cont, pts, kPi / 4.0, parallel, res.refined);

    res.min_abs_E = std::numeric_limits<double>::infinity();
    res.pattern_ok = true;
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        res.min_abs_E = std::min(res.min_abs_E, std::abs(pts[i].E));
        res.pattern_ok = res.pattern_ok && pts[i].pattern_ok;
        total += arg_step(pts[i].E, pts[(i + 1) % pts.size()].E);
    }
    res.total_arg = total;
    res.n_zeros = static_cast<int>(std::llround(total / (2.0 * kPi)));
    res.consistent = std::abs(total / (2.0 * kPi) - res.n_zeros) < 0.05;
    res.n_samples = pts.size();
    return res;
}

} // namespace

WindingResult winding_number(const EvansContext& ctx, const HalfRingContour& contour,
                             bool parallel) {
    HalfRingContour cont = contour;
    for (int attempt = 0; attempt < 4; ++attempt) {
        WindingResult res = winding_on(ctx, cont, parallel);
        if (res.min_abs_E >= 1e-10) return res;
        cont.r *= 1.31; // zero sits on (or next to) the boundary: move it
    }
    throw ZeroOnContour("winding_number: |E| < 1e-10 on the contour after perturbation");
}

std::vector<NyquistSample> nyquist_path(const EvansContext& ctx,
                                        const HalfRingContour& contour, bool parallel) {
    std::vector<ContourPoint> pts = initial_samples(ctx, contour, parallel);
    bool refined = false;
    refine(ctx, contour, pts, kPi / 8.0, parallel, refined);
    std::vector<NyquistSample> out;
    out.reserve(pts.size());
    for (const ContourPoint& p : pts) out.push_back({p.lambda, p.E});
    return out;
}

std::vector<std::pair<double, double>> real_axis_scan(const EvansContext& ctx,
                                                      double lambda_max, int n) {
    if (!(lambda_max > 0.0) || n < 1)
        throw InvalidParams("real_axis_scan: need lambda_max > 0 and n >= 1");
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    Complex anchor(0.0);
    CharRoots roots = ctx.alphas;
    for (int i = 1; i <= n; ++i) {
        const Complex lam(lambda_max * i / n, 0.0);
        const BetaRoots beta = beta_roots_from(ctx.params, lam, anchor, roots);
        const Complex E = evans_parts_with_roots(lam, ctx, beta).E;
        if (!(std::abs(E.imag()) <= 1e-9 * (1.0 + std::abs(E))))
            throw NonRealResult("real_axis_scan: E not real at lambda = " +
                                std::to_string(lam.real()));
        out.emplace_back(lam.real(), E.real());
        anchor = lam;
        roots = beta.roots;
    }
    return out;
}

std::optional<double> real_axis_zero(const EvansContext& ctx, double lambda_max, int n) {
    const auto scan = real_axis_scan(ctx, lambda_max, n);
    std::size_t i = 0;
    for (; i + 1 < scan.size(); ++i)
        if (scan[i].second * scan[i + 1].second < 0.0) break;
    if (i + 1 >= scan.size()) return std::nullopt;
    double lo = scan[i].first, hi = scan[i + 1].first;
    double flo = scan[i].second;
    auto Ere = [&](double x) { return evans_robust(Complex(x, 0.0), ctx).real(); };
    for (int it = 0; it < 100 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = Ere(mid);
        if (flo * fm <= 0.0)
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

LambdaCurves lambda_curves(const ModelParams& p, std::span<const double> k_grid) {
    p.validate();
    LambdaCurves out;
    const bool cubic = p.tau > 0.0;
    const int nb = cubic ? 3 : 2;
    out.branches.resize(nb);
    std::vector<Complex> prev;
    for (double k : k_grid) {
        const Complex beta(0.0, k);
        const ComplexCubic poly = lambda_poly(p, beta);
        std::vector<Complex> roots;
        if (cubic) {
            const auto r = solve_cubic(poly);
            roots.assign(r.begin(), r.end());
        } else {
            // gamma tau = 0: quadratic c2 x^2 + c1 x + c0
            const Complex disc = std::sqrt(poly.c1 * poly.c1 - 4.0 * poly.c2 * poly.c0);
            roots = {(-poly.c1 + disc) / (2.0 * poly.c2), (-poly.c1 - disc) / (2.0 * poly.c2)};
        }
        // polish on the cross-expression W_lambda(ik) and track the residual
        for (Complex& lam : roots) {
            for (int it = 0; it < 2; ++it) {
                const ComplexCubic w = char_poly_beta(p, lam);
                const Complex val = w(beta);
                // dW/dlambda at fixed beta, from the lambda-polynomial
                const Complex dval = poly.derivative(lam);
                if (std::abs(dval) < 1e-14) break;
                lam -= val / dval;
            }
            out.max_residual =
                std::max(out.max_residual, std::abs(char_poly_beta(p, lam)(beta)));
        }
        if (!prev.empty()) {
            // nearest-assignment continuation (branch count is 2 or 3)
            std::vector<Complex> matched(nb);
            std::vector<bool> used(nb, false);
            for (int j = 0; j < nb; ++j) {
                int bi = -1;
                double best = std::numeric_limits<double>::infinity();
                for (int m = 0; m < nb; ++m) {
                    if (used[m]) continue;
                    const double dd = std::abs(prev[j] - roots[m]);
                    if (dd < best) {
                        best = dd;
                        bi = m;
                    }
                }
                used[bi] = true;
                matched[j] = roots[bi];
                const double jump_scale = 1.0 + std::abs(prev[j]);
                if (best > 0.5 * jump_scale) out.continuous = false;
            }
            roots = matched;
        } else {
            std::sort(roots.begin(), roots.end(), [](const Complex& x, const Complex& y) {
                return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
            });
        }
        prev = roots;
        out.k.push_back(k);
        for (int j = 0; j < nb; ++j) out.branches[j].push_back(roots[j]);
    }
    return out;
}

VerdictResult stability_verdict(const EvansContext& ctx,
                                std::span<const HalfRingContour> ladder) {
    static const std::array<HalfRingContour, 3> kDefault{{{0.2, 20.0, 1000, 1000},
                                                          {0.1, 200.0, 1000, 1000},
                                                          {0.05, 1000.0, 1000, 1000}}};
    if (ladder.empty()) ladder = kDefault;

    VerdictResult out;
    bool all_clean = true;
    for (const HalfRingContour& cont : ladder) {
        WindingResult w = winding_number(ctx, cont);
        all_clean = all_clean && w.pattern_ok && w.consistent;
        out.ladder.push_back(w);
    }
    for (std::size_t i = 1; i < out.ladder.size(); ++i)
        if (out.ladder[i].n_zeros != out.ladder[0].n_zeros) all_clean = false;
    if (!all_clean) {
        out.verdict = Stability::inconclusive;
        return out;
    }
    out.n_zeros = out.ladder[0].n_zeros;
    out.verdict = out.n_zeros == 0 ? Stability::stable : Stability::unstable;
    return out;
}

VerdictResult stability_verdict(const ModelParams& p,
                                std::span<const HalfRingContour> ladder) {
    const WaveProfile w = build_profile(p);
    return stability_verdict(make_evans_context(w), ladder);
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        default: return "inconclusive";
    }
}

} // namespace relaxwave
