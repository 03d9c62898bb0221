#include "relaxwave/profile.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace relaxwave {

namespace {

Complex eigvec_w(Complex alpha, const ModelParams& p) {
    return p.b / (p.c * alpha + p.d);
}

struct Basis {
    std::array<Complex, 3> alpha; // a1, a2, a3
    std::array<Complex, 3> wcomp; // w components of X1, X2, X3
};

Basis make_basis(const CharRoots& al, const ModelParams& p) {
    Basis b;
    b.alpha = {al.r1, al.r2, al.r3};
    for (int j = 0; j < 3; ++j) b.wcomp[j] = eigvec_w(b.alpha[j], p);
    return b;
}

Complex det3(const std::array<Complex, 3>& c0, const std::array<Complex, 3>& c1,
             const std::array<Complex, 3>& c2) {
    return c0[0] * (c1[1] * c2[2] - c1[2] * c2[1]) -
           c1[0] * (c0[1] * c2[2] - c0[2] * c2[1]) +
           c2[0] * (c0[1] * c1[2] - c0[2] * c1[1]);
}

// Cramer solve of [X1 X2 X3] q = rhs with X_j = (alpha_j, 1, w_j).
std::array<Complex, 3> decompose(const Basis& bs, const std::array<Complex, 3>& rhs) {
    std::array<Complex, 3> X1{bs.alpha[0], 1.0, bs.wcomp[0]};
    std::array<Complex, 3> X2{bs.alpha[1], 1.0, bs.wcomp[1]};
    std::array<Complex, 3> X3{bs.alpha[2], 1.0, bs.wcomp[2]};
    const Complex den = det3(X1, X2, X3);
    const double scale = std::max({std::abs(bs.alpha[0]), std::abs(bs.alpha[1]),
                                   std::abs(bs.alpha[2]), 1.0});
    if (std::abs(den) < 1e-9 * scale)
        throw DegenerateRoots("fundamental matrix is numerically singular");
    return {det3(rhs, X2, X3) / den, det3(X1, rhs, X3) / den, det3(X1, X2, rhs) / den};
}

double take_real(Complex v, const char* what, double tol = 1e-9) {
    if (!(std::abs(v.imag()) <= tol * (1.0 + std::abs(v))))
        throw NonRealResult(std::string(what) + ": imaginary residue " +
                            std::to_string(v.imag()));
    return v.real();
}

void check_pair_separation(const CharRoots& al) {
    const double scale =
        std::max({std::abs(al.r1), std::abs(al.r2), std::abs(al.r3), 1.0});
    const double gap = std::min({std::abs(al.r1 - al.r2), std::abs(al.r1 - al.r3),
                                 std::abs(al.r2 - al.r3)});
    if (gap < 1e-8 * scale)
        throw DegenerateRoots("near-coalescent characteristic roots");
}

struct HKernel {
    Complex e1, e2; // -alpha1/alpha3, -alpha2/alpha3
    Complex k1, k2;
};

HKernel h_kernel(const CharRoots& al, const ModelParams& p) {
    check_pair_separation(al);
    const Complex a1 = al.r1, a2 = al.r2, a3 = al.r3;
    const double c = p.c, d = p.d;
    const Complex den = (a1 - a2) * (d + c * a3);
    HKernel k;
    k.e1 = -a1 / a3;
    k.e2 = -a2 / a3;
    k.k1 = a3 * (a2 - a3) * (d + c * a1) / (a1 * den);
    k.k2 = a3 * (a3 - a1) * (d + c * a2) / (a2 * den);
    return k;
}

} // namespace

double h_log(double t, const CharRoots& al, const ModelParams& p) {
    const HKernel k = h_kernel(al, p);
    const Complex v = -std::exp(k.e1 * t) * k.k1 - std::exp(k.e2 * t) * k.k2 + k.k1 + k.k2 +
                      std::expm1(t);
    return take_real(v, "h(s)");
}

double h_function(double s, const CharRoots& al, const ModelParams& p) {
    if (!(s > 0.0 && s <= 1.0))
        throw InvalidParams("h(s) requires s in (0, 1], got " + std::to_string(s));
    return h_log(std::log(s), al, p);
}

double h_limit_zero(const CharRoots& al, const ModelParams& p) {
    const Complex a1 = al.r1, a2 = al.r2, a3 = al.r3;
    const Complex v =
        p.d * (a3 * a3 - a3 * (a1 + a2) + a1 * a2) / (a1 * a2 * (p.d + p.c * a3)) - 2.0;
    return take_real(v, "h(0+)");
}

double h_second_at_one(const CharRoots& al, const ModelParams& p) {
    const Complex a1 = al.r1, a2 = al.r2, a3 = al.r3;
    const Complex v = 1.0 + (p.d * a3 + p.c * a3 * (a1 + a2) - p.c * a1 * a2) /
                                (a3 * (p.d + p.c * a3));
    return take_real(v, "h''(1)");
}

double solve_s(const ModelParams& p) {
    p.validate();
    const CharRoots al = alpha_roots(p);
    const HKernel k = h_kernel(al, p); // validates separation up front
    (void)k;

    // transient terms decay like e^{rho t}; pick the scan floor so they are
    // fully settled, and back the ceiling away from the quadratic zero at s=1
    const double rho = -al.r1.real() / al.r3.real();
    const double t_min = -std::max(60.0 / rho, 30.0);
    const double h2 = h_second_at_one(al, p);
    const double delta =
        std::clamp(std::sqrt(2e-11 / std::max(std::abs(h2), 1e-6)), 1e-6, 1e-2);
    const double t_max = std::log1p(-delta);

    constexpr int n = 512;
    constexpr double noise = 1e-11;
    std::array<double, n> ts, hs;
    for (int i = 0; i < n; ++i) {
        ts[i] = t_min + (t_max - t_min) * i / (n - 1);
        hs[i] = h_log(ts[i], al, p);
    }
    int bracket = -1, crossings = 0;
    for (int i = 0; i + 1 < n; ++i) {
        if (hs[i] * hs[i + 1] < 0.0 && std::max(std::abs(hs[i]), std::abs(hs[i + 1])) > noise) {
            ++crossings;
            if (bracket < 0) bracket = i;
        }
    }
    if (crossings == 0)
        throw NoRoot("h(s) has no interior sign change: no localized wave at c = " +
                     std::to_string(p.c));
    if (crossings > 1)
        throw NoRoot("h(s) has " + std::to_string(crossings) +
                     " interior roots; outside the single-pulse regime at c = " +
                     std::to_string(p.c));

    double lo = ts[bracket], hi = ts[bracket + 1];
    double flo = hs[bracket], fhi = hs[bracket + 1];
    for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = h_log(mid, al, p);
        if (flo * fm <= 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    // secant polish inside the bracket
    double t = (std::abs(flo) < std::abs(fhi)) ? lo : hi;
    for (int it = 0; it < 2; ++it) {
        if (fhi == flo) break;
        const double cand = hi - fhi * (hi - lo) / (fhi - flo);
        if (cand > lo && cand < hi) t = cand;
    }
    const double hval = h_log(t, al, p);
    if (!(std::abs(hval) < 1e-12))
        throw Error("solve_s: refined root has |h| = " + std::to_string(std::abs(hval)));
    return std::exp(t);
}

double threshold_from_s(double s, const CharRoots& al, const ModelParams& p) {
    const Complex a1 = al.r1, a2 = al.r2, a3 = al.r3;
    const Complex v = (1.0 - s) * a1 * a2 * (p.d + a3 * p.c) /
                      ((a3 - a1) * (a3 - a2) * (p.b + p.d));
    const double a = take_real(v, "threshold a");
    if (!(a > 0.0))
        throw Error("threshold_from_s: nonpositive threshold a = " + std::to_string(a));
    return a;
}

namespace {

// mode sums; anchor = 0 uses coefficients as stored, anchor = z1 shifts z
template <size_t N>
void accumulate(ProfileJet& jet, const std::array<Complex, N>& coef, const Basis& bs,
                double dz) {
    Complex u = 0, du = 0, d2u = 0, d3u = 0, w = 0, dw = 0, d2w = 0;
    for (size_t j = 0; j < N; ++j) {
        const Complex al = bs.alpha[j];
        const Complex e = coef[j] * std::exp(al * dz);
        u += e;
        du += al * e;
        d2u += al * al * e;
        d3u += al * al * al * e;
        const Complex we = e * bs.wcomp[j];
        w += we;
        dw += al * we;
        d2w += al * al * we;
    }
    jet.u += u.real();
    jet.du += du.real();
    jet.d2u += d2u.real();
    jet.d3u += d3u.real();
    jet.w += w.real();
    jet.dw += dw.real();
    jet.d2w += d2w.real();
}

} // namespace

ProfileJet eval_jet(const WaveProfile& w, double z) {
    ProfileJet jet{};
    const Basis bs = make_basis(w.alphas, w.params);
    if (z < 0.0) {
        const std::array<Complex, 1> coef{Complex(w.left)};
        Basis left{{bs.alpha[2]}, {bs.wcomp[2]}};
        accumulate(jet, coef, left, z);
        return jet;
    }
    if (z <= w.z1) {
        if (z <= 0.5 * w.z1)
            accumulate(jet, w.mid0, bs, z);
        else
            accumulate(jet, w.mid1, bs, z - w.z1);
        jet.u += w.u_rest;
        jet.w += w.w_rest;
        return jet;
    }
    Basis tail{{bs.alpha[0], bs.alpha[1]}, {bs.wcomp[0], bs.wcomp[1]}};
    accumulate(jet, w.right1, tail, z - w.z1);
    return jet;
}

ProfileSample eval_profile(const WaveProfile& w, double z) {
    const ProfileJet jet = eval_jet(w, z);
    return {z, jet.u, jet.du, jet.w};
}

std::array<double, 2> ode_residual(const WaveProfile& w, double z) {
    const ProfileJet jet = eval_jet(w, z);
    const ModelParams& p = w.params;
    const double H = jet.u > p.a ? 1.0 : 0.0;
    const double r1 = (p.tau * p.c * p.c - 1.0) * jet.d2u + p.c * jet.du + jet.u - H + jet.w;
    const double r2 = p.c * jet.dw - p.b * jet.u + p.d * jet.w;
    return {r1, r2};
}

WaveProfile build_profile(const ModelParams& p) {
    p.validate();
    WaveProfile prof;
    prof.alphas = alpha_roots(p);
    prof.s = solve_s(p);
    const double a3 = prof.alphas.r3.real();
    prof.z1 = -std::log(prof.s) / a3;

    const double a = threshold_from_s(prof.s, prof.alphas, p);
    if (p.has_a() && std::abs(p.a - a) > 1e-6 * std::max(a, 1e-30))
        throw InvalidParams("threshold a = " + std::to_string(p.a) +
                            " is off the speed curve at c = " + std::to_string(p.c) +
                            " (implied a = " + std::to_string(a) + ")");
    prof.params = p;
    prof.params.a = a;

    const Basis bs = make_basis(prof.alphas, p);
    prof.u_rest = p.d / (p.d + p.b);
    prof.w_rest = p.b / (p.d + p.b);

    // decompose the excited rest state P = (0, u_rest, w_rest) in the
    // eigenbasis; all interval coefficients are cancellation-free products
    // of these components (a = q3 (1-s) is the decay condition itself)
    const std::array<Complex, 3> q =
        decompose(bs, {Complex(0.0), Complex(prof.u_rest), Complex(prof.w_rest)});
    prof.left = a;
    prof.mid0 = {-q[0], -q[1], -q[2] * prof.s};
    prof.mid1 = {-q[0] * std::exp(bs.alpha[0] * prof.z1),
                 -q[1] * std::exp(bs.alpha[1] * prof.z1), -q[2]};
    prof.right1 = {prof.mid1[0] + q[0], prof.mid1[1] + q[1]};

    prof.du0 = a * a3;
    prof.du1 = take_real(prof.mid1[0] * bs.alpha[0] + prof.mid1[1] * bs.alpha[1] +
                             prof.mid1[2] * bs.alpha[2],
                         "u'(z1)");

    // threshold-crossing audit: u - a must change sign exactly twice, with
    // the grid offset so that no node lands on a switch point
    const double rho = -prof.alphas.r1.real();
    const double z_lo = -12.0 / a3, z_hi = prof.z1 + 12.0 / rho;
    constexpr int n = 2048;
    const double dz = (z_hi - z_lo) / n;
    int crossings = 0;
    double prev = eval_jet(prof, z_lo + 0.382 * dz).u - a;
    prof.u_max = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double z = z_lo + (i + 0.382) * dz;
        const ProfileJet jet = eval_jet(prof, z);
        prof.u_max = std::max(prof.u_max, jet.u);
        const double cur = jet.u - a;
        if (prev * cur < 0.0) ++crossings;
        if (cur != 0.0) prev = cur;
    }
    if (crossings != 2)
        throw AnsatzViolation("u crosses the threshold " + std::to_string(crossings) +
                              " times; the two-crossing ansatz fails at c = " +
                              std::to_string(p.c));
    return prof;
}

ExistenceVerdict existence_check(const ModelParams& p) {
    p.validate();
    if (!(p.d > 0.0))
        throw InvalidParams("existence_check requires d > 0");
    if (!(p.d - p.d * p.d + 2.0 * p.b > 0.0))
        throw InvalidParams("existence_check requires d - d^2 + 2b > 0");
    const double g = p.gamma();
    const RealCubic W = char_poly_alpha(p);
    const double x_lo = std::sqrt(g * (p.d + p.b) / (p.c * p.c * g + p.d));
    const double x_hi = std::sqrt(g * (p.d - p.d * p.d + 2.0 * p.b) / p.d);
    const double w_lo = W(x_lo), w_hi = W(x_hi);
    if (w_lo < 0.0 && 0.0 < w_hi) return ExistenceVerdict::min_branch;
    if (w_hi < 0.0 && 0.0 < w_lo) return ExistenceVerdict::max_branch;
    return ExistenceVerdict::none;
}

const char* to_string(ExistenceVerdict v) {
    switch (v) {
        case ExistenceVerdict::min_branch: return "min-branch";
        case ExistenceVerdict::max_branch: return "max-branch";
        default: return "none";
    }
}

} // namespace relaxwave
