#pragma once

#include <map>
#include <string>
#include <vector>

#include "relaxwave/evans.hpp"
#include "relaxwave/params.hpp"
#include "relaxwave/pde.hpp"
#include "relaxwave/speed_curve.hpp"

namespace relaxwave {

class ParseError : public Error {
public:
    using Error::Error;
};

enum class LogLevel { off = 0, error = 1, info = 2, debug = 3 };

/// Level from RELAXWAVE_LOG (off | error | info | debug); default error.
LogLevel log_level();
void log(LogLevel level, const std::string& msg);

struct RunConfig {
    std::string command; // profile | speedcurve | evans | winding | lambda-curves | simulate | verdict
    ModelParams params{};
    HalfRingContour contour{};
    SimConfig sim{};
    double c_min = 0.01;
    double c_max = 0.0; // 0 = 0.999 / sqrt(tau)
    int c_steps = 400;
    std::string out;             // empty = stdout
    std::string format = "csv"; // csv | json
};

/// Parse argv-style arguments (without the program name). A --config file
/// supplies flat key=value defaults; flags override file values. Unknown
/// keys and invalid numbers raise ParseError; parameter-invariant violations
/// raise InvalidParams.
RunConfig parse_config(const std::vector<std::string>& args);

/// key=value lines, '#' comments; throws ParseError on unknown keys.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Execute one command. Returns 0 on success, 2 when no wave exists at the
/// requested speed, 3 for an inconclusive stability verdict.
int run(const RunConfig& cfg);

/// Fixed 17-significant-digit scientific float for byte-stable CSV.
std::string csv_number(double v);

/// Resolved-config header block (one '# key=value' line per field).
std::string config_header(const RunConfig& cfg);

} // namespace relaxwave
