// Structured key-value run configuration: parsing, validation, serialization.
//
// Format: one `section.key = value` pair per line, `#` comments. Canonical
// example (the lossless transfer scenario):
//
//   model.auto_lambda_N = 2     # or model.lambda = <value>
//   model.kappa = 0
//   model.gamma = 0
//   model.n_max = 12
//   model.bundle_N = 2
//   pulses.amp = 0.05
//   pulses.sigma = 180
//   pulses.t1 = 1000
//   pulses.t2 = 750
//   pulses.period = 10000
//   pulses.count = 1
//   output.t_end = 2600
//   output.dt = 2
//
// Omitted detunings default to the resonance conditions Delta_1 = -lambda^2,
// Delta_2 = -lambda^2 - 1.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nbundle/format.hpp"
#include "nbundle/integrate.hpp"
#include "nbundle/model.hpp"
#include "nbundle/timeseries.hpp"

namespace nbundle {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMode { master, trajectory, both };

struct RunConfig {
    SystemConfig system;
    IntegratorSettings integrator;
    double t_end = 0.0;
    double dt = 10.0;
    RunMode mode = RunMode::master;
    int n_traj = 1;
    std::uint64_t seed = 1;
    bool audit = false;  // re-run key scalars at n_max = 16 and compare

    std::vector<double> output_grid() const { return linspace_grid(0.0, t_end, dt); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& v, int line) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config line " + std::to_string(line) +
                          ": not a number: '" + v + "'");
    }
}

inline long parse_int(const std::string& v, int line) {
    try {
        size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config line " + std::to_string(line) +
                          ": not an integer: '" + v + "'");
    }
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    std::map<std::string, std::pair<std::string, int>> kv;  // key -> (value, line)
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key or value");
        if (kv.count(key))
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": duplicate key '" + key + "'");
        kv[key] = {value, lineno};
    }

    static const std::vector<std::string> known = {
        "model.lambda",     "model.auto_lambda_N", "model.omega0",
        "model.kappa",      "model.gamma",         "model.delta1",
        "model.delta2",     "model.n_max",         "model.bundle_N",
        "pulses.amp",       "pulses.sigma",        "pulses.t1",
        "pulses.t2",        "pulses.period",       "pulses.count",
        "integrator.rel_tol", "integrator.abs_tol", "integrator.max_step",
        "output.t_end",     "output.dt",           "run.mode",
        "run.n_traj",       "run.seed",            "run.audit"};
    for (const auto& [k, v] : kv) {
        if (std::find(known.begin(), known.end(), k) == known.end())
            throw ConfigError("config line " + std::to_string(v.second) +
                              ": unknown key '" + k + "'");
    }

    std::vector<std::string> required = {"model.kappa",  "model.gamma",
                                         "model.n_max",  "model.bundle_N",
                                         "pulses.amp",   "pulses.sigma",
                                         "pulses.t1",    "pulses.t2",
                                         "pulses.period", "pulses.count",
                                         "output.t_end", "output.dt"};
    std::string missing;
    if (!kv.count("model.lambda") && !kv.count("model.auto_lambda_N"))
        missing += " model.lambda|model.auto_lambda_N";
    for (const auto& r : required)
        if (!kv.count(r)) missing += " " + r;
    if (!missing.empty())
        throw ConfigError("config: missing required fields:" + missing);

    auto num = [&kv](const std::string& k) {
        const auto& [v, ln] = kv.at(k);
        return detail::parse_number(v, ln);
    };
    auto integer = [&kv](const std::string& k) {
        const auto& [v, ln] = kv.at(k);
        return detail::parse_int(v, ln);
    };

    RunConfig rc;
    if (kv.count("model.lambda") && kv.count("model.auto_lambda_N"))
        throw ConfigError("config: model.lambda and model.auto_lambda_N are exclusive");
    if (kv.count("model.auto_lambda_N"))
        rc.system.lambda = lambda_n(static_cast<int>(integer("model.auto_lambda_N")));
    else
        rc.system.lambda = num("model.lambda");
    if (kv.count("model.omega0")) rc.system.omega0 = num("model.omega0");
    rc.system.kappa = num("model.kappa");
    rc.system.gamma = num("model.gamma");
    if (kv.count("model.delta1")) rc.system.delta1 = num("model.delta1");
    if (kv.count("model.delta2")) rc.system.delta2 = num("model.delta2");
    rc.system.trunc = FockTruncation(static_cast<int>(integer("model.n_max")));
    rc.system.bundle_N = static_cast<int>(integer("model.bundle_N"));
    rc.system.pulses.omega_0_amp = num("pulses.amp");
    rc.system.pulses.sigma = num("pulses.sigma");
    rc.system.pulses.t1 = num("pulses.t1");
    rc.system.pulses.t2 = num("pulses.t2");
    rc.system.pulses.period = num("pulses.period");
    rc.system.pulses.n_pulses = static_cast<int>(integer("pulses.count"));
    if (kv.count("integrator.rel_tol")) rc.integrator.rel_tol = num("integrator.rel_tol");
    if (kv.count("integrator.abs_tol")) rc.integrator.abs_tol = num("integrator.abs_tol");
    if (kv.count("integrator.max_step")) rc.integrator.max_step = num("integrator.max_step");
    rc.t_end = num("output.t_end");
    rc.dt = num("output.dt");
    if (kv.count("run.mode")) {
        const auto& [v, ln] = kv.at("run.mode");
        if (v == "master")
            rc.mode = RunMode::master;
        else if (v == "trajectory")
            rc.mode = RunMode::trajectory;
        else if (v == "both")
            rc.mode = RunMode::both;
        else
            throw ConfigError("config line " + std::to_string(ln) +
                              ": run.mode must be master|trajectory|both");
    }
    if (kv.count("run.n_traj")) rc.n_traj = static_cast<int>(integer("run.n_traj"));
    if (kv.count("run.seed"))
        rc.seed = static_cast<std::uint64_t>(integer("run.seed"));
    if (kv.count("run.audit")) {
        const auto& [v, ln] = kv.at("run.audit");
        if (v == "true")
            rc.audit = true;
        else if (v == "false")
            rc.audit = false;
        else
            throw ConfigError("config line " + std::to_string(ln) +
                              ": run.audit must be true|false");
    }

    try {
        rc.system.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!(rc.t_end > 0) || !(rc.dt > 0))
        throw ConfigError("config: output.t_end and output.dt must be > 0");
    if (rc.n_traj < 1) throw ConfigError("config: run.n_traj must be >= 1");
    return rc;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

inline std::string serialize_config(const RunConfig& rc) {
    std::ostringstream out;
    out << "model.lambda = " << format_double(rc.system.lambda, 17) << "\n";
    if (rc.system.omega0 != 0.0)
        out << "model.omega0 = " << format_double(rc.system.omega0, 17) << "\n";
    out << "model.kappa = " << format_double(rc.system.kappa, 17) << "\n";
    out << "model.gamma = " << format_double(rc.system.gamma, 17) << "\n";
    if (rc.system.delta1)
        out << "model.delta1 = " << format_double(*rc.system.delta1, 17) << "\n";
    if (rc.system.delta2)
        out << "model.delta2 = " << format_double(*rc.system.delta2, 17) << "\n";
    out << "model.n_max = " << rc.system.trunc.n_max << "\n";
    out << "model.bundle_N = " << rc.system.bundle_N << "\n";
    out << "pulses.amp = " << format_double(rc.system.pulses.omega_0_amp, 17) << "\n";
    out << "pulses.sigma = " << format_double(rc.system.pulses.sigma, 17) << "\n";
    out << "pulses.t1 = " << format_double(rc.system.pulses.t1, 17) << "\n";
    out << "pulses.t2 = " << format_double(rc.system.pulses.t2, 17) << "\n";
    out << "pulses.period = " << format_double(rc.system.pulses.period, 17) << "\n";
    out << "pulses.count = " << rc.system.pulses.n_pulses << "\n";
    out << "integrator.rel_tol = " << format_double(rc.integrator.rel_tol, 17) << "\n";
    out << "integrator.abs_tol = " << format_double(rc.integrator.abs_tol, 17) << "\n";
    out << "integrator.max_step = " << format_double(rc.integrator.max_step, 17) << "\n";
    out << "output.t_end = " << format_double(rc.t_end, 17) << "\n";
    out << "output.dt = " << format_double(rc.dt, 17) << "\n";
    out << "run.mode = "
        << (rc.mode == RunMode::master
                ? "master"
                : rc.mode == RunMode::trajectory ? "trajectory" : "both")
        << "\n";
    out << "run.n_traj = " << rc.n_traj << "\n";
    out << "run.seed = " << rc.seed << "\n";
    out << "run.audit = " << (rc.audit ? "true" : "false") << "\n";
    return out.str();
}

// Numeric parameter paths for sweeps.
inline void set_config_value(RunConfig& rc, const std::string& path, double value) {
    if (path == "model.lambda")
        rc.system.lambda = value;
    else if (path == "model.kappa")
        rc.system.kappa = value;
    else if (path == "model.gamma")
        rc.system.gamma = value;
    else if (path == "model.delta1")
        rc.system.delta1 = value;
    else if (path == "model.delta2")
        rc.system.delta2 = value;
    else if (path == "pulses.amp")
        rc.system.pulses.omega_0_amp = value;
    else if (path == "pulses.sigma")
        rc.system.pulses.sigma = value;
    else if (path == "pulses.t1")
        rc.system.pulses.t1 = value;
    else if (path == "pulses.t2")
        rc.system.pulses.t2 = value;
    else if (path == "pulses.period")
        rc.system.pulses.period = value;
    else if (path == "output.t_end")
        rc.t_end = value;
    else if (path == "output.dt")
        rc.dt = value;
    else
        throw ConfigError("sweep: unknown parameter path '" + path + "'");
    rc.system.validate();
}

}  // namespace nbundle
