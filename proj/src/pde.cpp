#include "relaxwave/pde.hpp"

#include <algorithm>
#include <cmath>

namespace relaxwave {

namespace {

double heaviside(double v, const SimConfig& cfg) {
    if (cfg.heaviside == HeavisideMode::sharp) return v > 0.0 ? 1.0 : 0.0;
    return 0.5 * (1.0 + std::tanh(v / cfg.smooth_width));
}

// leading threshold crossing, linearly interpolated; upward crossing nearest
// the travel direction (left-moving waves lead with their left edge)
bool find_front(const std::vector<double>& u, double a, double dx, double L,
                bool from_right, double& x) {
    const int n = static_cast<int>(u.size());
    if (!from_right) {
        for (int i = 0; i + 1 < n; ++i) {
            if (u[i] < a && u[i + 1] >= a) {
                x = -L + dx * (i + (a - u[i]) / (u[i + 1] - u[i]));
                return true;
            }
        }
    } else {
        for (int i = n - 2; i >= 0; --i) {
            if (u[i] >= a && u[i + 1] < a) {
                x = -L + dx * (i + (u[i] - a) / (u[i] - u[i + 1]));
                return true;
            }
        }
    }
    return false;
}

} // namespace

double cfl_dt(double tau, double dx, double safety) {
    return tau > 0.0 ? safety * dx * std::sqrt(tau) : safety * 0.5 * dx * dx;
}

SimState init_from_profile(const WaveProfile& prof, const SimConfig& cfg) {
    const ModelParams& p = prof.params;
    const double decay = std::max(1.0 / -prof.alphas.r1.real(), 1.0 / prof.alphas.r3.real());
    const double L_min = 10.0 * decay + p.c * cfg.T;
    const double L = cfg.L > 0.0 ? cfg.L : 1.05 * L_min;
    if (L < L_min)
        throw DomainTooSmall("half-domain L = " + std::to_string(L) + " below required " +
                             std::to_string(L_min));

    SimState st;
    st.L = L;
    const int n = cfg.nx;
    if (n < 16) throw InvalidParams("nx too small");
    st.dx = 2.0 * L / (n - 1);
    st.dt = cfg.dt > 0.0 ? cfg.dt : cfl_dt(p.tau, st.dx, cfg.safety);
    if (st.dt > cfl_dt(p.tau, st.dx, 1.0))
        throw InvalidParams("dt = " + std::to_string(st.dt) + " violates the CFL bound " +
                            std::to_string(cfl_dt(p.tau, st.dx, 1.0)));
    st.u.assign(n, 0.0);
    st.w.assign(n, 0.0);
    st.u_prev.assign(n, 0.0);

    const double amp = 1.0 + cfg.perturb_eps;
    std::vector<double> ut(n), lap(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double x = -L + i * st.dx;
        const ProfileSample ps = eval_profile(prof, x);
        st.u[i] = amp * ps.u;
        st.w[i] = amp * ps.w;
        ut[i] = amp * p.c * ps.du;
    }
    st.u[0] = st.u[n - 1] = 0.0;

    if (p.tau > 0.0) {
        // u(-dt) to second order from the PDE itself
        for (int i = 1; i + 1 < n; ++i)
            lap[i] = (st.u[i - 1] - 2.0 * st.u[i] + st.u[i + 1]) / (st.dx * st.dx);
        for (int i = 0; i < n; ++i) {
            const double rhs = lap[i] + heaviside(st.u[i] - prof.params.a, cfg) - st.u[i] -
                               st.w[i];
            const double utt = (rhs - ut[i]) / p.tau;
            st.u_prev[i] = st.u[i] - st.dt * ut[i] + 0.5 * st.dt * st.dt * utt;
        }
    }

    st.u0_max = *std::max_element(st.u.begin(), st.u.end());
    double x0;
    if (find_front(st.u, prof.params.a, st.dx, st.L, cfg.track_from_right, x0))
        st.front_history.emplace_back(0.0, x0);
    return st;
}

void step(SimState& st, const SimConfig& cfg, const ModelParams& p, bool parallel) {
    const int n = static_cast<int>(st.u.size());
    const double dx2 = st.dx * st.dx;
    const double dt = st.dt;
    const double a = p.a;
    static thread_local std::vector<double> next;
    next.assign(n, 0.0);

    double umax = 0.0;
    if (p.tau > 0.0) {
        const double A = p.tau / (dt * dt), B = 0.5 / dt;
#pragma omp parallel for schedule(static) reduction(max : umax) if (parallel)
        for (int i = 1; i < n - 1; ++i) {
            const double lap = (st.u[i - 1] - 2.0 * st.u[i] + st.u[i + 1]) / dx2;
            const double rhs = lap + heaviside(st.u[i] - a, cfg) - st.u[i] - st.w[i];
            next[i] = (rhs + A * (2.0 * st.u[i] - st.u_prev[i]) + B * st.u_prev[i]) / (A + B);
            umax = std::max(umax, std::abs(next[i]));
        }
    } else {
#pragma omp parallel for schedule(static) reduction(max : umax) if (parallel)
        for (int i = 1; i < n - 1; ++i) {
            const double lap = (st.u[i - 1] - 2.0 * st.u[i] + st.u[i + 1]) / dx2;
            const double rhs = lap + heaviside(st.u[i] - a, cfg) - st.u[i] - st.w[i];
            next[i] = st.u[i] + dt * rhs;
            umax = std::max(umax, std::abs(next[i]));
        }
    }
    next[0] = next[n - 1] = 0.0;

    // trapezoidal kinetics: (1 + dt d/2) w_next = (1 - dt d/2) w + dt b (u + u_next)/2
    const double wden = 1.0 + 0.5 * dt * p.d, wnum = 1.0 - 0.5 * dt * p.d;
#pragma omp parallel for schedule(static) if (parallel)
    for (int i = 0; i < n; ++i)
        st.w[i] = (wnum * st.w[i] + 0.5 * dt * p.b * (st.u[i] + next[i])) / wden;

    st.u_prev.swap(st.u);
    st.u.swap(next);
    st.t += dt;
    ++st.step_count;
    if (umax > 10.0 * std::max(st.u0_max, 1e-12)) st.blew_up = true;
}

Measurement measure(const SimState& st, const WaveProfile& prof, const SimConfig& cfg) {
    Measurement m;
    const int n = static_cast<int>(st.u.size());
    const double a = prof.params.a;

    double x_front;
    m.wave_found = find_front(st.u, a, st.dx, st.L, cfg.track_from_right, x_front);

    // amplitude ratio against the exact hump
    const double umax = *std::max_element(st.u.begin(), st.u.end());
    m.amplitude_ratio = umax / prof.u_max;

    if (!m.wave_found) {
        m.shape_err = std::numeric_limits<double>::infinity();
        return m;
    }

    // best-shift relative L2 distance to the exact profile
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double uc = eval_profile(prof, -st.L + i * st.dx - x_front).u;
        norm2 += uc * uc;
    }
    auto err_at = [&](double shift) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = -st.L + i * st.dx;
            const double diff = st.u[i] - eval_profile(prof, x - shift).u;
            acc += diff * diff;
        }
        return std::sqrt(acc / std::max(norm2, 1e-300));
    };
    double best_s = x_front, best = err_at(best_s);
    for (double s = x_front - 2.0; s <= x_front + 2.0; s += 0.1) {
        const double e = err_at(s);
        if (e < best) {
            best = e;
            best_s = s;
        }
    }
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = best_s - 0.1, hi = best_s + 0.1;
    double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
    double f1 = err_at(m1), f2 = err_at(m2);
    while (hi - lo > 1e-6) {
        if (f1 < f2) {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + gr * (hi - lo);
            f2 = err_at(m2);
        } else {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - gr * (hi - lo);
            f1 = err_at(m1);
        }
    }
    m.shape_err = err_at(0.5 * (lo + hi));

    // speed from a least-squares line through the recorded crossings
    const auto& hist = st.front_history;
    if (hist.size() >= 2) {
        double st_sum = 0, sx = 0, stt = 0, stx = 0;
        for (const auto& [t, x] : hist) {
            st_sum += t;
            sx += x;
            stt += t * t;
            stx += t * x;
        }
        const double nh = static_cast<double>(hist.size());
        const double slope = (nh * stx - st_sum * sx) / (nh * stt - st_sum * st_sum);
        m.speed_est = cfg.track_from_right ? slope : -slope;
    }
    return m;
}

RunSummary run_simulation(const WaveProfile& prof, const SimConfig& cfg, bool parallel) {
    RunSummary sum;
    SimState st = init_from_profile(prof, cfg);
    const ModelParams& p = prof.params;
    const double record_dt = cfg.record_dt > 0.0 ? cfg.record_dt : cfg.T / 256.0;
    double next_record = record_dt;
    const double measure_dt = cfg.T / 16.0;
    double next_measure = measure_dt;

    while (st.t < cfg.T - 0.5 * st.dt) {
        step(st, cfg, p, parallel);
        if (st.t >= next_record) {
            next_record += record_dt;
            double x;
            if (find_front(st.u, p.a, st.dx, st.L, cfg.track_from_right, x))
                st.front_history.emplace_back(st.t, x);
        }
        if (st.t >= next_measure) {
            next_measure += measure_dt;
            const Measurement m = measure(st, prof, cfg);
            sum.shape_err_series.emplace_back(st.t, m.shape_err);
            if (!m.wave_found || m.shape_err > 0.25 || m.amplitude_ratio < 0.5 ||
                m.amplitude_ratio > 2.0)
                sum.instability_flag = true;
        }
        if (st.blew_up) {
            sum.instability_flag = true;
            break;
        }
    }
    sum.final = measure(st, prof, cfg);
    if (!sum.final.wave_found || sum.final.shape_err > 0.25 ||
        sum.final.amplitude_ratio < 0.5 || sum.final.amplitude_ratio > 2.0)
        sum.instability_flag = true;
    sum.blew_up = st.blew_up;
    sum.state = std::move(st);
    return sum;
}

} // namespace relaxwave
