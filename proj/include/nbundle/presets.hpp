// Named scenario presets. Each preset carries the full parameter set for one
// published scenario; values the captions leave open (pulse count, trajectory
// seeds, output grids) are fixed here explicitly.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "nbundle/config.hpp"

namespace nbundle {

inline const std::map<std::string, std::string>& preset_texts() {
    static const std::map<std::string, std::string> presets = {
        // Lossless two-photon transfer: single pulse pair, no dissipation.
        {"fig1d",
         "model.auto_lambda_N = 2\n"
         "model.kappa = 0\n"
         "model.gamma = 0\n"
         "model.n_max = 12\n"
         "model.bundle_N = 2\n"
         "pulses.amp = 0.05\n"
         "pulses.sigma = 180\n"
         "pulses.t1 = 1000\n"
         "pulses.t2 = 750\n"
         "pulses.period = 10000\n"
         "pulses.count = 1\n"
         "output.t_end = 2600\n"
         "output.dt = 2\n"
         "run.mode = master\n"},
        // One STIRAP period at three resonator decay rates.
        {"fig2a",
         "model.auto_lambda_N = 2\n"
         "model.kappa = 0.0008\n"
         "model.gamma = 0.002\n"
         "model.n_max = 12\n"
         "model.bundle_N = 2\n"
         "pulses.amp = 0.05\n"
         "pulses.sigma = 180\n"
         "pulses.t1 = 1000\n"
         "pulses.t2 = 750\n"
         "pulses.period = 10000\n"
         "pulses.count = 1\n"
         "integrator.rel_tol = 1e-9\n"
         "output.t_end = 10000\n"
         "output.dt = 10\n"
         "run.mode = master\n"},
        {"fig2b",
         "model.auto_lambda_N = 2\n"
         "model.kappa = 0.0006\n"
         "model.gamma = 0.002\n"
         "model.n_max = 12\n"
         "model.bundle_N = 2\n"
         "pulses.amp = 0.05\n"
         "pulses.sigma = 180\n"
         "pulses.t1 = 1000\n"
         "pulses.t2 = 750\n"
         "pulses.period = 10000\n"
         "pulses.count = 1\n"
         "integrator.rel_tol = 1e-9\n"
         "output.t_end = 10000\n"
         "output.dt = 10\n"
         "run.mode = master\n"},
        {"fig2c",
         "model.auto_lambda_N = 2\n"
         "model.kappa = 0.0004\n"
         "model.gamma = 0.002\n"
         "model.n_max = 12\n"
         "model.bundle_N = 2\n"
         "pulses.amp = 0.05\n"
         "pulses.sigma = 180\n"
         "pulses.t1 = 1000\n"
         "pulses.t2 = 750\n"
         "pulses.period = 10000\n"
         "pulses.count = 1\n"
         "integrator.rel_tol = 1e-9\n"
         "output.t_end = 10000\n"
         "output.dt = 10\n"
         "run.mode = master\n"},
        // Single trajectory of sequential two-photon bundle emission; two
        // pulse cycles (the caption leaves the pulse count open).
        {"fig3",
         "model.auto_lambda_N = 2\n"
         "model.kappa = 0.0006\n"
         "model.gamma = 0.002\n"
         "model.n_max = 12\n"
         "model.bundle_N = 2\n"
         "pulses.amp = 0.05\n"
         "pulses.sigma = 180\n"
         "pulses.t1 = 1000\n"
         "pulses.t2 = 750\n"
         "pulses.period = 10000\n"
         "pulses.count = 2\n"
         "integrator.rel_tol = 1e-6\n"
         "output.t_end = 20000\n"
         "output.dt = 10\n"
         "run.mode = trajectory\n"
         "run.n_traj = 1\n"
         "run.seed = 7\n"},
        // Average photon number along a trajectory, T = 12000, two cycles.
        {"fig4a",
         "model.auto_lambda_N = 2\n"
         "model.kappa = 0.0006\n"
         "model.gamma = 0.002\n"
         "model.n_max = 12\n"
         "model.bundle_N = 2\n"
         "pulses.amp = 0.05\n"
         "pulses.sigma = 180\n"
         "pulses.t1 = 1000\n"
         "pulses.t2 = 750\n"
         "pulses.period = 12000\n"
         "pulses.count = 2\n"
         "integrator.rel_tol = 1e-6\n"
         "output.t_end = 24000\n"
         "output.dt = 12\n"
         "run.mode = trajectory\n"
         "run.n_traj = 1\n"
         "run.seed = 11\n"},
        {"fig4b",
         "model.auto_lambda_N = 3\n"
         "model.kappa = 0.0006\n"
         "model.gamma = 0.002\n"
         "model.n_max = 12\n"
         "model.bundle_N = 3\n"
         "pulses.amp = 0.1\n"
         "pulses.sigma = 180\n"
         "pulses.t1 = 1000\n"
         "pulses.t2 = 750\n"
         "pulses.period = 12000\n"
         "pulses.count = 2\n"
         "integrator.rel_tol = 1e-6\n"
         "output.t_end = 24000\n"
         "output.dt = 12\n"
         "run.mode = trajectory\n"
         "run.n_traj = 1\n"
         "run.seed = 11\n"},
        // Correlation functions, two-photon case: three cycles at T = 10000.
        {"fig5abc",
         "model.auto_lambda_N = 2\n"
         "model.kappa = 0.0006\n"
         "model.gamma = 0.002\n"
         "model.n_max = 12\n"
         "model.bundle_N = 2\n"
         "pulses.amp = 0.05\n"
         "pulses.sigma = 180\n"
         "pulses.t1 = 1000\n"
         "pulses.t2 = 750\n"
         "pulses.period = 10000\n"
         "pulses.count = 3\n"
         "integrator.rel_tol = 1e-9\n"
         "output.t_end = 30000\n"
         "output.dt = 10\n"
         "run.mode = master\n"},
        // Correlation functions, three-photon case: T = 12000.
        {"fig5de",
         "model.auto_lambda_N = 3\n"
         "model.kappa = 0.0006\n"
         "model.gamma = 0.002\n"
         "model.n_max = 12\n"
         "model.bundle_N = 3\n"
         "pulses.amp = 0.1\n"
         "pulses.sigma = 180\n"
         "pulses.t1 = 1000\n"
         "pulses.t2 = 750\n"
         "pulses.period = 12000\n"
         "pulses.count = 3\n"
         "integrator.rel_tol = 1e-9\n"
         "output.t_end = 36000\n"
         "output.dt = 12\n"
         "run.mode = master\n"},
    };
    return presets;
}

inline std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : preset_texts()) names.push_back(k);
    return names;
}

inline RunConfig preset_config(const std::string& name) {
    const auto& all = preset_texts();
    const auto it = all.find(name);
    if (it == all.end()) throw ConfigError("unknown preset '" + name + "'");
    return parse_config(it->second);
}

}  // namespace nbundle
