#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "potential.hpp"
#include "waves.hpp"

namespace wavestep {

enum class RunMode { continuous, wavepacket };

/// Everything one scattering run needs. Populated from a config file and
/// command-line overrides, then validated as a whole.
struct SimulationConfig {
    std::vector<double> steps;
    std::vector<double> values;
    double mass = 2000.0;
    double hbar = 1.0;
    std::optional<double> energy;
    std::optional<double> x_left;
    std::optional<double> x_right;
    std::optional<std::pair<double, double>> launch_interval;
    int launch_points = 51;
    RunMode mode = RunMode::continuous;
    Side incident = Side::left;
    double tol = 1e-4;
    int max_cycles = 200;
    int min_cycles = 1;
    double dt_sync = 1e-9;
    std::vector<double> snapshot_times;
    int plot_points = 401;

    PiecewisePotential potential() const {
        return PiecewisePotential(steps, values, mass, hbar);
    }

    /// Launch interval, defaulting to a three-unit stretch hugging the
    /// observation window on the incident side.
    std::pair<double, double> launch() const {
        if (launch_interval)
            return *launch_interval;
        if (incident == Side::left)
            return {*x_left - 3.0, *x_left};
        return {*x_right, *x_right + 3.0};
    }

    void validate(bool need_energy = true) const {
        if (values.empty())
            throw ConfigError("missing field: values");
        if (steps.size() + 1 != values.size())
            throw ConfigError("values must hold exactly one more entry than steps");
        potential(); // step ordering, wall placement, mass checks
        if (!x_left)
            throw ConfigError("missing field: x-left");
        if (!x_right)
            throw ConfigError("missing field: x-right");
        if (!(*x_left < *x_right))
            throw ConfigError("x-left must lie left of x-right");
        if (!steps.empty() && !(*x_left < steps.front() && steps.back() < *x_right))
            throw ConfigError("observation window must enclose every step strictly");
        if (need_energy && !energy)
            throw ConfigError("missing field: energy");
        if (need_energy && !(*energy > 0.0))
            throw ConfigError("energy must be positive");
        const auto [a, b] = launch();
        if (!(a < b))
            throw ConfigError("launch interval must have positive length");
        if (incident == Side::left && b > *x_left)
            throw ConfigError("launch interval must sit left of x-left for a left-incident wave");
        if (incident == Side::right && a < *x_right)
            throw ConfigError("launch interval must sit right of x-right for a right-incident wave");
        if (launch_points < 1)
            throw ConfigError("launch-points must be at least 1");
        if (!(tol > 0.0))
            throw ConfigError("tol must be positive");
        if (max_cycles < 1 || min_cycles < 1)
            throw ConfigError("cycle limits must be at least 1");
        if (!(dt_sync > 0.0))
            throw ConfigError("dt-sync must be positive");
        if (plot_points < 2)
            throw ConfigError("plot-points must be at least 2");
    }
};

namespace detail {

inline std::string_view trim(std::string_view sv) {
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front())))
        sv.remove_prefix(1);
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.back())))
        sv.remove_suffix(1);
    return sv;
}

inline double parse_number(std::string_view sv, const std::string& key) {
    const std::string text(trim(sv));
    if (text.empty())
        throw ConfigError("empty number for key '" + key + "'");
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size())
        throw ConfigError("bad number '" + text + "' for key '" + key + "'");
    return v;
}

inline long parse_integer(std::string_view sv, const std::string& key) {
    const double v = parse_number(sv, key);
    const long n = static_cast<long>(v);
    if (static_cast<double>(n) != v)
        throw ConfigError("key '" + key + "' wants an integer");
    return n;
}

/// Parses "[a, b, c]" or a bare comma/space separated list.
inline std::vector<double> parse_list(std::string_view sv, const std::string& key) {
    std::string text(trim(sv));
    if (!text.empty() && text.front() == '[') {
        if (text.back() != ']')
            throw ConfigError("unterminated list for key '" + key + "'");
        text = text.substr(1, text.size() - 2);
    }
    for (char& ch : text)
        if (ch == ',')
            ch = ' ';
    std::vector<double> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok)
        out.push_back(parse_number(tok, key));
    return out;
}

} // namespace detail

/// Applies one key=value setting. Keys are kebab-case and shared verbatim
/// with the command-line flags.
inline void apply_setting(SimulationConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_integer;
    using detail::parse_list;
    using detail::parse_number;

    if (key == "steps") {
        cfg.steps = parse_list(value, key);
    } else if (key == "values") {
        cfg.values = parse_list(value, key);
        if (cfg.values.empty())
            throw ConfigError("values must not be empty");
    } else if (key == "mass") {
        cfg.mass = parse_number(value, key);
    } else if (key == "hbar") {
        cfg.hbar = parse_number(value, key);
    } else if (key == "energy") {
        cfg.energy = parse_number(value, key);
    } else if (key == "x-left") {
        cfg.x_left = parse_number(value, key);
    } else if (key == "x-right") {
        cfg.x_right = parse_number(value, key);
    } else if (key == "launch-interval") {
        const auto v = parse_list(value, key);
        if (v.size() != 2)
            throw ConfigError("launch-interval wants exactly two numbers");
        cfg.launch_interval = {std::min(v[0], v[1]), std::max(v[0], v[1])};
    } else if (key == "launch-points") {
        cfg.launch_points = static_cast<int>(parse_integer(value, key));
    } else if (key == "mode") {
        const std::string m(detail::trim(value));
        if (m == "cw" || m == "continuous")
            cfg.mode = RunMode::continuous;
        else if (m == "wavepacket")
            cfg.mode = RunMode::wavepacket;
        else
            throw ConfigError("mode must be cw or wavepacket, got '" + m + "'");
    } else if (key == "incident") {
        const std::string s(detail::trim(value));
        if (s == "left")
            cfg.incident = Side::left;
        else if (s == "right")
            cfg.incident = Side::right;
        else
            throw ConfigError("incident must be left or right, got '" + s + "'");
    } else if (key == "tol") {
        cfg.tol = parse_number(value, key);
    } else if (key == "max-cycles") {
        cfg.max_cycles = static_cast<int>(parse_integer(value, key));
    } else if (key == "min-cycles") {
        cfg.min_cycles = static_cast<int>(parse_integer(value, key));
    } else if (key == "dt-sync") {
        cfg.dt_sync = parse_number(value, key);
    } else if (key == "snapshot-times") {
        cfg.snapshot_times = parse_list(value, key);
    } else if (key == "plot-points") {
        cfg.plot_points = static_cast<int>(parse_integer(value, key));
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

/// Parses the flat key = value format, '#' starting a comment.
inline SimulationConfig parse_config_text(const std::string& text) {
    SimulationConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string_view sv = detail::trim(line);
        if (sv.empty())
            continue;
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key(detail::trim(sv.substr(0, eq)));
        const std::string value(detail::trim(sv.substr(eq + 1)));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        apply_setting(cfg, key, value);
    }
    return cfg;
}

inline SimulationConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace wavestep
