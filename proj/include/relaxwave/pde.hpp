#pragma once

#include <vector>

#include "relaxwave/profile.hpp"

namespace relaxwave {

class DomainTooSmall : public Error {
public:
    using Error::Error;
};

class WaveLost : public Error {
public:
    using Error::Error;
};

enum class HeavisideMode { sharp, smoothed };

struct SimConfig {
    double L = 0.0;  // half-domain length; 0 = sized from decay rates and c T
    int nx = 4096;   // grid points on [-L, L]
    double dt = 0.0; // 0 = CFL-limited: safety * dx sqrt(tau) (dx^2/2 at tau=0)
    double T = 10.0; // horizon
    double perturb_eps = 0.0; // relative amplitude perturbation of the initial state
    HeavisideMode heaviside = HeavisideMode::sharp;
    double smooth_width = 0.05;
    double safety = 0.9;
    double record_dt = 0.0;   // crossing-history cadence; 0 = T/256
    bool track_from_right = false; // mirrored runs track the rightmost crossing
};

struct SimState {
    double t = 0.0;
    long step_count = 0;
    double dx = 0.0, dt = 0.0, L = 0.0;
    std::vector<double> u, u_prev, w;
    double u0_max = 0.0;
    bool blew_up = false;
    std::vector<std::pair<double, double>> front_history; // (t, crossing position)
};

struct Measurement {
    double speed_est = 0.0;
    double shape_err = 0.0;
    double amplitude_ratio = 0.0;
    bool wave_found = false;
};

struct RunSummary {
    Measurement final;
    std::vector<std::pair<double, double>> shape_err_series; // (t, shape_err)
    bool instability_flag = false;
    bool blew_up = false;
    SimState state; // final fields
};

/// Effective CFL-limited time step for the given tau and dx.
double cfl_dt(double tau, double dx, double safety = 0.9);

/// Sample the exact wave onto the grid: u(0,x) = u_c(x), w(0,x) = w_c(x),
/// u_t(0,x) = c u_c'(x); the whole state is scaled by (1 + perturb_eps).
/// Throws DomainTooSmall when L < 10 max(1/|Re a1|, 1/a3) + c T.
SimState init_from_profile(const WaveProfile& prof, const SimConfig& cfg);

/// One explicit step: centered three-level update of the damped wave part
/// (forward Euler at tau = 0), trapezoidal kinetics for w.
void step(SimState& st, const SimConfig& cfg, const ModelParams& p, bool parallel = true);

/// Instantaneous diagnostics against the exact profile: best-shift relative
/// L2 error, amplitude ratio, speed fit over the recorded crossing history.
Measurement measure(const SimState& st, const WaveProfile& prof, const SimConfig& cfg);

/// Step to T, recording crossings and the shape-error series, and evaluate
/// the instability detector (shape_err > 25% or amplitude ratio outside
/// [0.5, 2], or field blow-up past 10x the initial maximum).
RunSummary run_simulation(const WaveProfile& prof, const SimConfig& cfg,
                          bool parallel = true);

} // namespace relaxwave
