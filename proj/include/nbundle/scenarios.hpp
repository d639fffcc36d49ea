// Scenario execution shared by the CLI and the verification suite: master
// equation runs with derived correlation columns, trajectory runs, the
// dissipative-ordering comparison and the correlation-inequality analysis.

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nbundle/config.hpp"
#include "nbundle/lindblad.hpp"
#include "nbundle/observables.hpp"
#include "nbundle/presets.hpp"
#include "nbundle/trajectories.hpp"

namespace nbundle {

struct MasterRun {
    RunConfig rc;
    std::vector<DensityState> states;  // one per output grid time
    TimeSeries series;                 // standard observable columns
    TimeSeries g2_series;  // equal-time g2_1 and g2_N on the defined subgrid
};

// Master-equation evolution from |g,0> over the output grid.
inline MasterRun run_master_scenario(const RunConfig& rc) {
    MasterRun out;
    out.rc = rc;
    const auto diss = zero_temp_dissipators(rc.system);
    DensityState rho0{Op::Zero(rc.system.trunc.dim(), rc.system.trunc.dim()), 0.0};
    rho0.rho(0, 0) = 1.0;
    out.states = evolve_master(rho0, rc.output_grid(), rc.system, diss, rc.integrator);
    out.series = observable_series(out.states, rc.system);

    // Correlation columns use the emission-channel operator b + lambda s+s-
    // (the operator the photon dissipator couples to); the bare-b statistic is
    // only a good proxy while the excited-state population is negligible.
    const int N = rc.system.bundle_N;
    for (const auto& st : out.states) {
        const auto g1 = g2_equal_time_displaced(st.rho, rc.system, 1);
        const auto gN = g2_equal_time_displaced(st.rho, rc.system, N);
        if (!g1 || !gN) continue;
        out.g2_series.grid.push_back(st.time);
        if (out.g2_series.columns.empty()) {
            out.g2_series.columns.emplace_back("g2_1", std::vector<double>{});
            out.g2_series.columns.emplace_back("g2_" + std::to_string(N),
                                               std::vector<double>{});
        }
        out.g2_series.columns[0].second.push_back(*g1);
        out.g2_series.columns[1].second.push_back(*gN);
    }
    return out;
}

struct TrajectoryRun {
    RunConfig rc;
    std::vector<TrajectoryRecord> records;  // per-trajectory full records
    EnsembleResult ensemble;                // filled when n_traj > 1
};

// MCWF run from |g,0>: full records (seeds derived from the master seed), plus
// ensemble statistics when more than one trajectory is requested.
inline TrajectoryRun run_trajectory_scenario(const RunConfig& rc, int n_threads = 0,
                                             const TrajectoryOptions& opts = {}) {
    TrajectoryRun out;
    out.rc = rc;
    const auto diss = zero_temp_dissipators(rc.system);
    PureState psi0{basis_state(0, 0, rc.system.trunc), 0.0};
    const auto grid = rc.output_grid();
    for (int k = 0; k < rc.n_traj; ++k)
        out.records.push_back(run_trajectory(psi0, grid, rc.system, diss,
                                             derive_stream_seed(rc.seed, k),
                                             rc.integrator, opts));
    if (rc.n_traj > 1)
        out.ensemble = run_ensemble(psi0, grid, rc.system, diss, rc.n_traj, rc.seed,
                                    rc.integrator, n_threads, opts);
    return out;
}

// Fraction of trajectories in which every pulse cycle contains exactly N
// photon-channel jumps clustered within the given window.
struct CycleJumpStats {
    int n_traj = 0;
    int n_conforming = 0;
    double fraction() const { return n_traj > 0 ? double(n_conforming) / n_traj : 0.0; }
};

inline CycleJumpStats bundle_cycle_stats(
    const std::vector<std::vector<Jump>>& trajectory_jumps, const RunConfig& rc,
    const DissipatorSet& diss, double cluster_window) {
    const double T = rc.system.pulses.period;
    const int n_cycles = rc.system.pulses.n_pulses;
    const int N = rc.system.bundle_N;
    CycleJumpStats st;
    st.n_traj = static_cast<int>(trajectory_jumps.size());
    for (const auto& jumps : trajectory_jumps) {
        bool ok = true;
        for (int c = 0; c < n_cycles && ok; ++c) {
            const double lo = c * T, hi = (c + 1) * T;
            double tmin = 0, tmax = 0;
            int count = 0;
            for (const auto& j : jumps) {
                if (!diss.channels[j.channel].photon_channel) continue;
                if (j.time < lo || j.time >= hi) continue;
                if (count == 0) tmin = tmax = j.time;
                tmin = std::min(tmin, j.time);
                tmax = std::max(tmax, j.time);
                ++count;
            }
            ok = count == N && (tmax - tmin) <= cluster_window;
        }
        if (ok) ++st.n_conforming;
    }
    return st;
}

// Equal-time extrema and delayed-coincidence scans behind the correlation
// scenario: t_s1 maximizes g2_1(t,t) and t_s2 minimizes g2_N(t,t) over the
// second pulse cycle; the tau scans then start from those instants.
struct CorrelationAnalysis {
    double ts1 = 0, ts2 = 0;
    double g1_equal = 0, gN_equal = 0;
    TimeSeries tau_scan_g1;  // grid holds t_s1 + tau (dense, for output files)
    TimeSeries tau_scan_gN;
    bool ineq_g1_super = false;   // g2_1(ts1,ts1) > 1
    bool ineq_gN_sub = false;     // g2_N(ts2,ts2) < 1
    bool ineq_g1_decay = false;   // g2_1(ts1,ts1) > g2_1(ts1,ts1+tau), contract grid
    bool ineq_gN_growth = false;  // g2_N(ts2,ts2) < g2_N(ts2,ts2+tau), contract grid

    bool all_ok() const {
        return ineq_g1_super && ineq_gN_sub && ineq_g1_decay && ineq_gN_growth;
    }
};

inline CorrelationAnalysis analyze_correlations(const MasterRun& run, double tau_max,
                                                double tau_step) {
    const auto& rc = run.rc;
    const int N = rc.system.bundle_N;
    const double T = rc.system.pulses.period;
    const std::string gN_name = "g2_" + std::to_string(N);

    CorrelationAnalysis a;
    a.ts1 = locate_extremum_time(run.g2_series, "g2_1", T, 2 * T, true);
    a.ts2 = locate_extremum_time(run.g2_series, gN_name, T, 2 * T, false);

    auto state_at = [&run](double t) -> const DensityState& {
        for (const auto& st : run.states)
            if (std::abs(st.time - t) < 1e-9) return st;
        throw std::invalid_argument("analyze_correlations: no stored state at requested time");
    };
    const auto& col_g1 = run.g2_series.column("g2_1");
    const auto& col_gN = run.g2_series.column(gN_name);
    for (size_t i = 0; i < run.g2_series.grid.size(); ++i) {
        if (run.g2_series.grid[i] == a.ts1) a.g1_equal = col_g1[i];
        if (run.g2_series.grid[i] == a.ts2) a.gN_equal = col_gN[i];
    }

    std::vector<double> taus;
    for (double tau = tau_step; tau <= tau_max + 1e-9; tau += tau_step)
        taus.push_back(tau);

    const auto diss = zero_temp_dissipators(rc.system);
    a.tau_scan_g1 = g2_delayed(state_at(a.ts1), taus, 1, rc.system, diss,
                               rc.integrator, /*displaced=*/true);
    a.tau_scan_gN = g2_delayed(state_at(a.ts2), taus, N, rc.system, diss,
                               rc.integrator, /*displaced=*/true);

    a.ineq_g1_super = a.g1_equal > 1.0;
    a.ineq_gN_sub = a.gN_equal < 1.0;
    // The decay/growth clauses address the envelope on the emission timescale
    // (1/kappa), so they are evaluated at quarter-lifetime resolution
    // (tau_k = k/(4 kappa), rounded to the dense-scan grid); below that scale
    // the delayed statistic still carries intra-pulse transients (and, for
    // the bare operator, resonator-frequency oscillations) that the envelope
    // statement does not constrain. The dense scans are kept as-is for the
    // output files.
    const double kappa = rc.system.kappa;
    const size_t stride =
        kappa > 0 ? std::max<size_t>(1, std::llround(0.25 / (kappa * tau_step)))
                  : 1;
    auto envelope_ok = [stride](const TimeSeries& scan, const std::string& col,
                                double eq, bool want_below) {
        if (scan.grid.empty()) return false;
        const auto& v = scan.column(col);
        bool ok = false;  // require at least one contract point
        for (size_t i = stride - 1; i < v.size(); i += stride) {
            if (want_below ? !(v[i] < eq) : !(v[i] > eq)) return false;
            ok = true;
        }
        return ok;
    };
    a.ineq_g1_decay = envelope_ok(a.tau_scan_g1, "g2_1", a.g1_equal, true);
    a.ineq_gN_growth = envelope_ok(a.tau_scan_gN, gN_name, a.gN_equal, false);
    return a;
}

// Max P_{|g,N>} across a list of resonator decay rates (the dissipative
// ordering comparison); returns one value per kappa, same order.
inline std::vector<double> max_population_vs_kappa(const RunConfig& base,
                                                   const std::vector<double>& kappas) {
    std::vector<double> out;
    const std::string col = "P_g" + std::to_string(base.system.bundle_N);
    for (double k : kappas) {
        RunConfig rc = base;
        set_config_value(rc, "model.kappa", k);
        const auto run = run_master_scenario(rc);
        double best = 0.0;
        for (double v : run.series.column(col)) best = std::max(best, v);
        out.push_back(best);
    }
    return out;
}

}  // namespace nbundle
