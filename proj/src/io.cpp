#include "relaxwave/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace relaxwave {

using nlohmann::json;

LogLevel log_level() {
    const char* env = std::getenv("RELAXWAVE_LOG");
    if (!env) return LogLevel::error;
    const std::string v(env);
    if (v == "off") return LogLevel::off;
    if (v == "info") return LogLevel::info;
    if (v == "debug") return LogLevel::debug;
    return LogLevel::error;
}

void log(LogLevel level, const std::string& msg) {
    static const LogLevel active = log_level();
    if (level <= active && active != LogLevel::off)
        std::cerr << "[relaxwave] " << msg << "\n";
}

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    static const std::vector<std::string> known = {
        "a",  "b",  "c",       "d",     "tau",     "r",   "R",   "n_arc", "n_seg", "c_min",
        "c_max", "c_steps", "L", "nx", "dt", "T", "eps", "out", "format", "command"};
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ParseError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        kv[key] = val;
    }
    return kv;
}

namespace {

double to_double(const std::string& key, const std::string& val) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(val, &pos);
        if (pos != val.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError("config key '" + key + "': cannot parse number '" + val + "'");
    }
}

int to_int(const std::string& key, const std::string& val) {
    const double v = to_double(key, val);
    if (v != static_cast<int>(v))
        throw ParseError("config key '" + key + "': expected integer, got '" + val + "'");
    return static_cast<int>(v);
}

} // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
    RunConfig cfg;
    std::string config_path;

    CLI::App app{"traveling waves and Evans-function stability for the relaxing "
                 "two-component threshold model"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    double a = std::numeric_limits<double>::quiet_NaN();
    app.add_option("--config", config_path, "flat key=value config file");
    app.add_option("--a", a, "threshold level (derived from c when omitted)");
    app.add_option("--b", cfg.params.b, "kinetic coupling rate");
    app.add_option("--c", cfg.params.c, "wave speed");
    app.add_option("--d", cfg.params.d, "kinetic decay rate");
    app.add_option("--tau", cfg.params.tau, "relaxation time");
    app.add_option("--r", cfg.contour.r, "inner contour radius");
    app.add_option("--R", cfg.contour.R, "outer contour radius (also evans scan extent "
                                         "and lambda-curves k range)");
    app.add_option("--n-arc", cfg.contour.n_arc, "samples per contour arc");
    app.add_option("--n-seg", cfg.contour.n_seg, "samples per contour segment / scan");
    app.add_option("--c-min", cfg.c_min, "speed-grid lower end");
    app.add_option("--c-max", cfg.c_max, "speed-grid upper end (0 = admissibility bound)");
    app.add_option("--c-steps", cfg.c_steps, "speed-grid points");
    app.add_option("--L", cfg.sim.L, "half-domain length / profile export range");
    app.add_option("--nx", cfg.sim.nx, "grid points");
    app.add_option("--dt", cfg.sim.dt, "time step (0 = CFL-limited)");
    app.add_option("--T", cfg.sim.T, "simulation horizon");
    app.add_option("--eps", cfg.sim.perturb_eps, "initial amplitude perturbation");
    app.add_option("--out", cfg.out, "output path (default stdout)");
    app.add_option("--format", cfg.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));

    for (const char* name : {"profile", "speedcurve", "evans", "winding", "lambda-curves",
                             "simulate", "verdict"})
        app.add_subcommand(name)->fallthrough();

    std::vector<const char*> argv;
    argv.push_back("relaxwave");
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) // --help
            throw ParseError(app.help());
        throw ParseError(e.what());
    }

    // file values fill in anything not provided on the command line
    if (!config_path.empty()) {
        const auto kv = read_config_file(config_path);
        auto absent = [&](const std::string& flag) { return app.count("--" + flag) == 0; };
        for (const auto& [key, val] : kv) {
            if (key == "a" && absent("a")) a = to_double(key, val);
            else if (key == "b" && absent("b")) cfg.params.b = to_double(key, val);
            else if (key == "c" && absent("c")) cfg.params.c = to_double(key, val);
            else if (key == "d" && absent("d")) cfg.params.d = to_double(key, val);
            else if (key == "tau" && absent("tau")) cfg.params.tau = to_double(key, val);
            else if (key == "r" && absent("r")) cfg.contour.r = to_double(key, val);
            else if (key == "R" && absent("R")) cfg.contour.R = to_double(key, val);
            else if (key == "n_arc" && absent("n-arc")) cfg.contour.n_arc = to_int(key, val);
            else if (key == "n_seg" && absent("n-seg")) cfg.contour.n_seg = to_int(key, val);
            else if (key == "c_min" && absent("c-min")) cfg.c_min = to_double(key, val);
            else if (key == "c_max" && absent("c-max")) cfg.c_max = to_double(key, val);
            else if (key == "c_steps" && absent("c-steps")) cfg.c_steps = to_int(key, val);
            else if (key == "L" && absent("L")) cfg.sim.L = to_double(key, val);
            else if (key == "nx" && absent("nx")) cfg.sim.nx = to_int(key, val);
            else if (key == "dt" && absent("dt")) cfg.sim.dt = to_double(key, val);
            else if (key == "T" && absent("T")) cfg.sim.T = to_double(key, val);
            else if (key == "eps" && absent("eps")) cfg.sim.perturb_eps = to_double(key, val);
            else if (key == "out" && absent("out")) cfg.out = val;
            else if (key == "format" && absent("format")) cfg.format = val;
            else if (key == "command" && cfg.command.empty()) cfg.command = val;
        }
        if (cfg.format != "csv" && cfg.format != "json")
            throw ParseError("format must be csv or json, got '" + cfg.format + "'");
    }

    for (const auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    if (cfg.command.empty())
        throw ParseError("no command given (profile | speedcurve | evans | winding | "
                         "lambda-curves | simulate | verdict)");

    cfg.params.a = a;
    // validate numeric invariants up front for commands that need a speed
    if (cfg.command != "speedcurve") cfg.params.validate();
    if (cfg.contour.r <= 0.0 || cfg.contour.R <= cfg.contour.r)
        throw InvalidParams("contour radii must satisfy 0 < r < R");
    if (cfg.contour.n_arc < 4 || cfg.contour.n_seg < 4)
        throw InvalidParams("contour sample counts must be at least 4");
    if (cfg.c_steps < 3) throw InvalidParams("c_steps must be at least 3");
    return cfg;
}

// ---------------------------------------------------------------------------
// output helpers

namespace {

json params_json(const ModelParams& p) {
    json j{{"b", p.b}, {"c", p.c}, {"d", p.d}, {"tau", p.tau}, {"gamma", p.gamma()}};
    if (p.has_a()) j["a"] = p.a;
    return j;
}

json config_json(const RunConfig& cfg) {
    return json{{"command", cfg.command},
                {"params", params_json(cfg.params)},
                {"contour", {{"r", cfg.contour.r},
                             {"R", cfg.contour.R},
                             {"n_arc", cfg.contour.n_arc},
                             {"n_seg", cfg.contour.n_seg}}},
                {"sim", {{"L", cfg.sim.L},
                         {"nx", cfg.sim.nx},
                         {"dt", cfg.sim.dt},
                         {"T", cfg.sim.T},
                         {"eps", cfg.sim.perturb_eps}}},
                {"c_grid", {{"c_min", cfg.c_min}, {"c_max", cfg.c_max}, {"c_steps", cfg.c_steps}}},
                {"format", cfg.format}};
}

json complex_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

void write_out(const RunConfig& cfg, const std::string& body) {
    if (cfg.out.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + cfg.out);
    out << body;
}

std::vector<double> make_c_grid(const RunConfig& cfg) {
    const double c_max =
        cfg.c_max > 0.0 ? cfg.c_max
                        : (cfg.params.tau > 0.0 ? 0.999 / std::sqrt(cfg.params.tau) : 10.0);
    if (!(cfg.c_min > 0.0 && c_max > cfg.c_min))
        throw InvalidParams("speed grid needs 0 < c_min < c_max");
    std::vector<double> grid(cfg.c_steps);
    const double ratio = std::log(c_max / cfg.c_min);
    for (int i = 0; i < cfg.c_steps; ++i)
        grid[i] = cfg.c_min * std::exp(ratio * i / (cfg.c_steps - 1));
    return grid;
}

int cmd_profile(const RunConfig& cfg) {
    const WaveProfile prof = build_profile(cfg.params);
    json header{{"params", params_json(prof.params)},
                {"s", prof.s},
                {"z1", prof.z1},
                {"alphas", {complex_json(prof.alphas.r1), complex_json(prof.alphas.r2),
                            complex_json(prof.alphas.r3)}},
                {"du0", prof.du0},
                {"du1", prof.du1},
                {"u_max", prof.u_max}};

    const double a3 = prof.alphas.r3.real();
    const double rho = -prof.alphas.r1.real();
    const double pad = cfg.sim.L > 0.0 ? cfg.sim.L : 12.0 / std::min(a3, rho) + 2.0;
    const double z_lo = -pad, z_hi = prof.z1 + pad;
    const int n = cfg.sim.nx;

    if (cfg.format == "json") {
        json samples = json::array();
        for (int i = 0; i < n; ++i) {
            const double z = z_lo + (z_hi - z_lo) * i / (n - 1);
            const ProfileSample s = eval_profile(prof, z);
            samples.push_back({{"z", s.z}, {"u", s.u}, {"du", s.du}, {"w", s.w}});
        }
        write_out(cfg, json{{"config", config_json(cfg)},
                            {"header", header},
                            {"samples", samples}}
                           .dump(2) +
                           "\n");
        return 0;
    }
    std::ostringstream os;
    os << config_header(cfg);
    os << "# header=" << header.dump() << "\n";
    os << "z,u,du,w\n";
    for (int i = 0; i < n; ++i) {
        const double z = z_lo + (z_hi - z_lo) * i / (n - 1);
        const ProfileSample s = eval_profile(prof, z);
        os << csv_number(s.z) << ',' << csv_number(s.u) << ',' << csv_number(s.du) << ','
           << csv_number(s.w) << "\n";
    }
    write_out(cfg, os.str());
    return 0;
}

int cmd_speedcurve(const RunConfig& cfg) {
    const std::vector<double> grid = make_c_grid(cfg);
    SpeedCurve curve = trace_curve(cfg.params.b, cfg.params.d, cfg.params.tau, grid);
    if (curve.points.empty()) {
        log(LogLevel::error, "speedcurve: no wave exists on the requested grid");
        return 2;
    }
    std::string fold_note;
    try {
        find_fold(curve);
    } catch (const Error& e) {
        fold_note = e.what();
    }

    json summary{{"a_star", curve.a_star},
                 {"c_star", curve.c_star},
                 {"n_points", curve.points.size()},
                 {"n_gaps", curve.gaps.size()},
                 {"c_min", grid.front()},
                 {"c_max", grid.back()},
                 {"c_steps", grid.size()}};
    if (!fold_note.empty()) summary["fold_note"] = fold_note;

    if (cfg.format == "json") {
        json pts = json::array();
        for (const CurvePoint& q : curve.points)
            pts.push_back({{"c", q.c}, {"a", q.a}, {"s", q.s}, {"z1", q.z1},
                           {"alpha3", q.alpha3}});
        write_out(cfg, json{{"config", config_json(cfg)},
                            {"summary", summary},
                            {"points", pts},
                            {"gaps", curve.gaps}}
                           .dump(2) +
                           "\n");
        return 0;
    }
    std::ostringstream os;
    os << config_header(cfg);
    os << "# summary=" << summary.dump() << "\n";
    os << "c,a,s,z1,alpha3\n";
    for (const CurvePoint& q : curve.points)
        os << csv_number(q.c) << ',' << csv_number(q.a) << ',' << csv_number(q.s) << ','
           << csv_number(q.z1) << ',' << csv_number(q.alpha3) << "\n";
    write_out(cfg, os.str());
    return 0;
}

int cmd_evans(const RunConfig& cfg) {
    const WaveProfile prof = build_profile(cfg.params);
    const EvansContext ctx = make_evans_context(prof);
    const auto scan = real_axis_scan(ctx, cfg.contour.R, cfg.contour.n_seg);

    if (cfg.format == "json") {
        json pts = json::array();
        for (const auto& [lam, E] : scan) pts.push_back({{"lambda", lam}, {"E", E}});
        write_out(cfg, json{{"config", config_json(cfg)}, {"scan", pts}}.dump(2) + "\n");
        return 0;
    }
    std::ostringstream os;
    os << config_header(cfg);
    os << "lambda,E\n";
    for (const auto& [lam, E] : scan) os << csv_number(lam) << ',' << csv_number(E) << "\n";
    write_out(cfg, os.str());
    return 0;
}

int cmd_winding(const RunConfig& cfg) {
    const WaveProfile prof = build_profile(cfg.params);
    const EvansContext ctx = make_evans_context(prof);

    if (cfg.format == "csv") { // Nyquist boundary image
        const auto path = nyquist_path(ctx, cfg.contour);
        std::ostringstream os;
        os << config_header(cfg);
        os << "re_lambda,im_lambda,re_E,im_E\n";
        for (const NyquistSample& s : path)
            os << csv_number(s.lambda.real()) << ',' << csv_number(s.lambda.imag()) << ','
               << csv_number(s.E.real()) << ',' << csv_number(s.E.imag()) << "\n";
        write_out(cfg, os.str());
        return 0;
    }
    const WindingResult w = winding_number(ctx, cfg.contour);
    write_out(cfg, json{{"config", config_json(cfg)},
                        {"r", w.used_r},
                        {"R", w.used_R},
                        {"n_zeros", w.n_zeros},
                        {"min_abs_E", w.min_abs_E},
                        {"total_arg", w.total_arg},
                        {"refined", w.refined},
                        {"pattern_ok", w.pattern_ok},
                        {"consistent", w.consistent},
                        {"samples", w.n_samples}}
                       .dump(2) +
                       "\n");
    return 0;
}

int cmd_lambda_curves(const RunConfig& cfg) {
    const double k_max = cfg.contour.R;
    const int half = cfg.contour.n_seg;
    std::vector<double> ks(2 * half + 1);
    for (int i = 0; i <= 2 * half; ++i) ks[i] = k_max * (i - half) / half;
    const LambdaCurves curves = lambda_curves(cfg.params, ks);

    if (cfg.format == "json") {
        json branches = json::array();
        for (const auto& br : curves.branches) {
            json arr = json::array();
            for (const Complex& z : br) arr.push_back(complex_json(z));
            branches.push_back(arr);
        }
        write_out(cfg, json{{"config", config_json(cfg)},
                            {"k", curves.k},
                            {"branches", branches},
                            {"max_residual", curves.max_residual},
                            {"continuous", curves.continuous}}
                           .dump(2) +
                           "\n");
        return 0;
    }
    std::ostringstream os;
    os << config_header(cfg);
    os << "k";
    for (std::size_t j = 1; j <= curves.branches.size(); ++j)
        os << ",re_lambda_" << j << ",im_lambda_" << j;
    os << "\n";
    for (std::size_t i = 0; i < curves.k.size(); ++i) {
        os << csv_number(curves.k[i]);
        for (const auto& br : curves.branches)
            os << ',' << csv_number(br[i].real()) << ',' << csv_number(br[i].imag());
        os << "\n";
    }
    write_out(cfg, os.str());
    return 0;
}

int cmd_simulate(const RunConfig& cfg) {
    const WaveProfile prof = build_profile(cfg.params);
    SimConfig sim = cfg.sim;

    if (cfg.format == "json") {
        const RunSummary sum = run_simulation(prof, sim);
        json series = json::array();
        for (const auto& [t, e] : sum.shape_err_series)
            series.push_back({{"t", t}, {"shape_err", e}});
        write_out(cfg, json{{"config", config_json(cfg)},
                            {"speed_est", sum.final.speed_est},
                            {"shape_err", sum.final.shape_err},
                            {"amplitude_ratio", sum.final.amplitude_ratio},
                            {"wave_found", sum.final.wave_found},
                            {"instability_flag", sum.instability_flag},
                            {"blew_up", sum.blew_up},
                            {"shape_err_series", series}}
                           .dump(2) +
                           "\n");
        return 0;
    }

    // snapshots at 0, T/4, T/2, 3T/4, T
    std::ostringstream os;
    os << config_header(cfg);
    os << "t,x,u,w\n";
    SimState st = init_from_profile(prof, sim);
    const ModelParams& p = prof.params;
    auto dump_state = [&](const SimState& s) {
        for (std::size_t i = 0; i < s.u.size(); ++i)
            os << csv_number(s.t) << ',' << csv_number(-s.L + i * s.dx) << ','
               << csv_number(s.u[i]) << ',' << csv_number(s.w[i]) << "\n";
    };
    dump_state(st);
    for (int quarter = 1; quarter <= 4; ++quarter) {
        const double target = cfg.sim.T * quarter / 4.0;
        while (st.t < target - 0.5 * st.dt && !st.blew_up) step(st, sim, p);
        dump_state(st);
    }
    write_out(cfg, os.str());
    return 0;
}

int cmd_verdict(const RunConfig& cfg) {
    VerdictResult v;
    try {
        v = stability_verdict(cfg.params);
    } catch (const NoRoot& e) {
        write_out(cfg, json{{"config", config_json(cfg)},
                            {"exists", false},
                            {"error", e.what()}}
                           .dump(2) +
                           "\n");
        return 2;
    }
    json ladder = json::array();
    for (const WindingResult& w : v.ladder)
        ladder.push_back({{"r", w.used_r},
                          {"R", w.used_R},
                          {"n_zeros", w.n_zeros},
                          {"min_abs_E", w.min_abs_E},
                          {"pattern_ok", w.pattern_ok},
                          {"consistent", w.consistent}});
    write_out(cfg, json{{"config", config_json(cfg)},
                        {"exists", true},
                        {"verdict", to_string(v.verdict)},
                        {"n_zeros", v.n_zeros},
                        {"ladder", ladder}}
                       .dump(2) +
                       "\n");
    return v.verdict == Stability::inconclusive ? 3 : 0;
}

} // namespace

std::string config_header(const RunConfig& cfg) {
    std::ostringstream os;
    os << "# relaxwave " << cfg.command << "\n";
    os << "# config=" << config_json(cfg).dump() << "\n";
    return os.str();
}

int run(const RunConfig& cfg) {
    try {
        if (cfg.command == "profile") return cmd_profile(cfg);
        if (cfg.command == "speedcurve") return cmd_speedcurve(cfg);
        if (cfg.command == "evans") return cmd_evans(cfg);
        if (cfg.command == "winding") return cmd_winding(cfg);
        if (cfg.command == "lambda-curves") return cmd_lambda_curves(cfg);
        if (cfg.command == "simulate") return cmd_simulate(cfg);
        if (cfg.command == "verdict") return cmd_verdict(cfg);
        log(LogLevel::error, "unknown command: " + cfg.command);
        return 1;
    } catch (const NoRoot& e) {
        log(LogLevel::error, e.what());
        return 2;
    } catch (const Error& e) {
        log(LogLevel::error, e.what());
        return 1;
    }
}

} // namespace relaxwave
