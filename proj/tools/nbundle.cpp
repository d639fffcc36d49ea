// Command-line driver: lambda / run / reproduce / sweep.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical-invariant failure,
// 4 inequality failure in reproduce mode.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nbundle/config.hpp"
#include "nbundle/io.hpp"
#include "nbundle/presets.hpp"
#include "nbundle/scenarios.hpp"

namespace fs = std::filesystem;
using namespace nbundle;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitInequality = 4;

fs::path default_out_dir() {
    if (const char* env = std::getenv("NBUNDLE_OUT")) return fs::path(env);
    return fs::path("out");
}

// Collects emitted files so a failed run can remove its partial outputs and a
// successful one can close with a digest manifest.
struct OutputSet {
    fs::path dir;
    RunManifest manifest;
    std::vector<fs::path> written;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit OutputSet(const fs::path& d) : dir(d) { fs::create_directories(dir); }

    void write(const std::string& name, const std::string& content) {
        const fs::path p = dir / name;
        write_file(p, content);
        written.push_back(p);
    }

    void finalize(const std::string& config_snapshot, std::uint64_t seed) {
        manifest.config_snapshot = config_snapshot;
        manifest.master_seed = seed;
        manifest.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        for (const auto& p : written) manifest.add_output(p);
        write_file(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
        std::cout << "wrote " << written.size() + 1 << " files to " << dir.string()
                  << "\n";
    }

    void remove_partial() {
        for (const auto& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
};

void write_series_outputs(OutputSet& out, const std::string& stem, const MasterRun& run) {
    out.write(stem + ".csv", timeseries_csv(run.series));
    out.write(stem + ".meta.json",
              metadata_sidecar(serialize_config(run.rc), run.rc.seed,
                               "master-equation observable series")
                      .dump(2) +
                  "\n");
    if (!run.g2_series.grid.empty())
        out.write(stem + "_g2.csv", timeseries_csv(run.g2_series));
}

void write_trajectory_outputs(OutputSet& out, const std::string& stem,
                              const TrajectoryRun& run) {
    std::string records;
    for (const auto& rec : run.records) records += trajectory_record_line(rec) + "\n";
    out.write(stem + "_records.jsonl", records);
    out.write(stem + ".csv", timeseries_csv(run.records.front().observables));
    if (run.rc.n_traj > 1) {
        out.write(stem + "_mean.csv", timeseries_csv(run.ensemble.mean));
        out.write(stem + "_stderr.csv", timeseries_csv(run.ensemble.std_error));
    }
    out.write(stem + ".meta.json",
              metadata_sidecar(serialize_config(run.rc), run.rc.seed,
                               "quantum-trajectory run")
                      .dump(2) +
                  "\n");
}

int cmd_lambda(int N, double tol) {
    const double v = lambda_n(N, tol);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    std::cout << buf << "\n";
    return 0;
}

void apply_overrides(RunConfig& rc, std::optional<std::uint64_t> seed,
                     std::optional<int> traj) {
    if (seed) rc.seed = *seed;
    if (traj) {
        rc.n_traj = *traj;
        if (rc.n_traj < 1) throw ConfigError("--traj must be >= 1");
    }
    if (rc.system.drive_strength_warning())
        std::cerr << "warning: drive amplitude " << rc.system.pulses.omega_0_amp
                  << " is large relative to the resonator frequency; the two-tone "
                     "approximation degrades\n";
}

int cmd_run(const RunConfig& rc, const fs::path& out_dir, int n_threads) {
    OutputSet out(out_dir);
    try {
        if (rc.mode == RunMode::master || rc.mode == RunMode::both) {
            const auto run = run_master_scenario(rc);
            write_series_outputs(out, "master", run);
            out.write("master.svg",
                      svg_plot(run.series,
                               {"P_g0", "P_g" + std::to_string(rc.system.bundle_N),
                                "P_e", "n_photon"},
                               "master-equation run"));
        }
        if (rc.mode == RunMode::trajectory || rc.mode == RunMode::both) {
            const auto run = run_trajectory_scenario(rc, n_threads);
            write_trajectory_outputs(out, "trajectory", run);
        }
    } catch (const std::exception& e) {
        out.remove_partial();
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitInvariant;
    }
    out.finalize(serialize_config(rc), rc.seed);
    return 0;
}

int reproduce_1d(OutputSet& out) {
    const auto rc = preset_config("fig1d");
    const auto run = run_master_scenario(rc);
    write_series_outputs(out, "fig1d_populations", run);
    out.write("fig1d.svg", svg_plot(run.series, {"P_g0", "P_g1", "P_g2", "P_e"},
                                    "lossless two-photon transfer"));
    const double final_pg2 = run.series.column("P_g2").back();
    std::cout << "final P_g2 = " << format_double(final_pg2, 6) << "\n";
    if (final_pg2 < 0.98) {
        std::cerr << "inequality failure: final P_g2 < 0.98\n";
        return kExitInequality;
    }
    return 0;
}

int reproduce_2(OutputSet& out) {
    std::vector<double> maxima;
    TimeSeries combined;
    for (const std::string name : {"fig2a", "fig2b", "fig2c"}) {
        const auto rc = preset_config(name);
        const auto run = run_master_scenario(rc);
        write_series_outputs(out, name, run);
        const auto& col = run.series.column("P_g2");
        maxima.push_back(*std::max_element(col.begin(), col.end()));
        if (combined.grid.empty()) combined.grid = run.series.grid;
        combined.columns.emplace_back("P_g2_kappa" + format_double(rc.system.kappa, 4),
                                      col);
    }
    out.write("fig2.svg", svg_plot(combined,
                                   {combined.columns[0].first, combined.columns[1].first,
                                    combined.columns[2].first},
                                   "population vs resonator decay (t in units of 1000)",
                                   1e-3));
    // presets run in kappa order 0.0008, 0.0006, 0.0004
    std::cout << "max P_g2: " << format_double(maxima[0], 6) << " (kappa=0.0008), "
              << format_double(maxima[1], 6) << " (kappa=0.0006), "
              << format_double(maxima[2], 6) << " (kappa=0.0004)\n";
    const bool ordered = maxima[0] < maxima[1] && maxima[1] < maxima[2] &&
                         maxima[2] < 1.0;
    if (!ordered) {
        std::cerr << "inequality failure: max P_g2 not strictly decreasing in kappa\n";
        return kExitInequality;
    }
    return 0;
}

int reproduce_3(OutputSet& out) {
    auto rc = preset_config("fig3");
    TrajectoryOptions opts;
    opts.capture_times = {1500.0, 2500.0, 5000.0};
    const auto run = run_trajectory_scenario(rc, 1, opts);
    write_trajectory_outputs(out, "fig3_trajectory", run);
    out.write("fig3.svg",
              svg_plot(run.records.front().observables, {"P_g0", "P_g2", "P_e", "n_photon"},
                       "single trajectory, two-photon bundles (t in units of 1000)",
                       1e-3));
    const auto axis = wigner_default_axis();
    int idx = 0;
    for (const auto& st : run.records.front().captured_states) {
        const Op rho = st.psi * st.psi.adjoint();
        const Op rho_b = reduced_photon_state(rho, rc.system.trunc);
        out.write("fig3_wigner_" + std::to_string(idx) + ".csv",
                  wigner_csv(wigner(rho_b, axis, axis)));
        out.write("fig3_snapshot_" + std::to_string(idx) + ".csv",
                  snapshot_csv(density_snapshot(rho, rc.system.trunc)));
        ++idx;
    }
    std::cout << "trajectory jumps: " << run.records.front().jumps.size() << "\n";
    return 0;
}

int reproduce_4(OutputSet& out) {
    for (const std::string name : {"fig4a", "fig4b"}) {
        const auto rc = preset_config(name);
        const auto run = run_trajectory_scenario(rc, 1);
        write_trajectory_outputs(out, name, run);
        out.write(name + ".svg",
                  svg_plot(run.records.front().observables, {"n_photon"},
                           "photon-number staircase, N = " +
                               std::to_string(rc.system.bundle_N) +
                               " (t in units of 1000)",
                           1e-3));
    }
    return 0;
}

int reproduce_5(OutputSet& out) {
    bool ok = true;
    for (const std::string name : {"fig5abc", "fig5de"}) {
        const auto rc = preset_config(name);
        const auto run = run_master_scenario(rc);
        write_series_outputs(out, name, run);
        const auto a = analyze_correlations(run, 2000.0, rc.dt);
        const std::string gN = "g2_" + std::to_string(rc.system.bundle_N);
        out.write(name + "_tau_g1.csv", timeseries_csv(a.tau_scan_g1));
        out.write(name + "_tau_" + gN + ".csv", timeseries_csv(a.tau_scan_gN));
        out.write(name + "_g2.svg",
                  svg_plot(run.g2_series, {"g2_1", gN},
                           "equal-time correlations (t in units of 1000)", 1e-3));
        std::cout << name << ": g2_1(ts1,ts1) = " << format_double(a.g1_equal, 6)
                  << ", " << gN << "(ts2,ts2) = " << format_double(a.gN_equal, 6)
                  << ", inequalities "
                  << (a.all_ok() ? "satisfied" : "VIOLATED") << "\n";
        ok = ok && a.all_ok();
    }
    if (!ok) {
        std::cerr << "inequality failure: correlation contract violated\n";
        return kExitInequality;
    }
    return 0;
}

int cmd_reproduce(const std::string& id, const fs::path& out_dir) {
    OutputSet out(out_dir);
    int rc_code = 0;
    try {
        if (id == "1d")
            rc_code = reproduce_1d(out);
        else if (id == "2")
            rc_code = reproduce_2(out);
        else if (id == "3")
            rc_code = reproduce_3(out);
        else if (id == "4")
            rc_code = reproduce_4(out);
        else if (id == "5")
            rc_code = reproduce_5(out);
        else {
            std::cerr << "unknown figure id '" << id << "' (expected 1d, 2, 3, 4 or 5)\n";
            return kExitConfig;
        }
    } catch (const std::exception& e) {
        out.remove_partial();
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitInvariant;
    }
    if (rc_code != 0) return rc_code;
    out.finalize("preset " + id, 0);
    return 0;
}

int cmd_sweep(const RunConfig& base, const std::string& param,
              const std::vector<double>& values, const fs::path& out_dir,
              int n_threads) {
    OutputSet out(out_dir);
    const std::string pcol = "P_g" + std::to_string(base.system.bundle_N);
    std::string table = param + ",max_" + pcol + ",photon_jumps,qubit_jumps,final_trace_drift\n";
    try {
        for (double v : values) {
            RunConfig rc = base;
            set_config_value(rc, param, v);
            double maxp = 0.0, drift = 0.0;
            long pj = 0, qj = 0;
            if (rc.mode == RunMode::master || rc.mode == RunMode::both) {
                const auto run = run_master_scenario(rc);
                const auto& col = run.series.column(pcol);
                maxp = *std::max_element(col.begin(), col.end());
                drift = run.series.column("trace_drift").back();
            }
            if (rc.mode == RunMode::trajectory || rc.mode == RunMode::both) {
                const auto run = run_trajectory_scenario(rc, n_threads);
                const auto diss = zero_temp_dissipators(rc.system);
                for (const auto& rec : run.records)
                    for (const auto& j : rec.jumps)
                        (diss.channels[j.channel].photon_channel ? pj : qj)++;
                if (rc.mode == RunMode::trajectory) {
                    const auto& col = run.records.front().observables.column(pcol);
                    maxp = *std::max_element(col.begin(), col.end());
                }
            }
            table += format_double(v) + "," + format_double(maxp) + "," +
                     std::to_string(pj) + "," + std::to_string(qj) + "," +
                     format_double(drift) + "\n";
        }
    } catch (const std::exception& e) {
        out.remove_partial();
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitInvariant;
    }
    out.write("sweep.csv", table);
    std::cout << table;
    out.finalize(serialize_config(base) + "sweep.param = " + param + "\n", base.seed);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driven qubit-resonator bundle-emission simulator"};
    app.require_subcommand(1);

    int lambda_N = 0;
    double lambda_tol = 1e-9;
    auto* sub_lambda = app.add_subcommand("lambda", "print the coupling lambda_N");
    sub_lambda->add_option("N", lambda_N, "bundle photon number (>= 1)")->required();
    sub_lambda->add_option("--tol", lambda_tol, "bisection tolerance");

    std::string config_path, preset_name, out_str;
    std::optional<std::uint64_t> seed_opt;
    std::optional<int> traj_opt;
    int threads = 0;
    auto* sub_run = app.add_subcommand("run", "execute one configuration");
    sub_run->add_option("--config", config_path, "config file path");
    sub_run->add_option("--preset", preset_name, "named preset instead of --config");
    sub_run->add_option("--out", out_str, "output directory");
    sub_run->add_option("--seed", seed_opt, "master seed override");
    sub_run->add_option("--traj", traj_opt, "trajectory count override");
    sub_run->add_option("--threads", threads, "worker threads (0 = hardware)");

    std::string figure_id;
    auto* sub_rep = app.add_subcommand("reproduce", "regenerate a published scenario");
    sub_rep->add_option("figure", figure_id, "one of 1d, 2, 3, 4, 5")->required();
    sub_rep->add_option("--out", out_str, "output directory");

    std::string sweep_param;
    std::vector<double> sweep_values;
    auto* sub_sweep = app.add_subcommand("sweep", "scan one numeric parameter");
    sub_sweep->add_option("--config", config_path, "config file path");
    sub_sweep->add_option("--preset", preset_name, "named preset instead of --config");
    sub_sweep->add_option("--param", sweep_param, "parameter path, e.g. model.kappa")
        ->required();
    sub_sweep->add_option("--values", sweep_values, "values to scan")->required();
    sub_sweep->add_option("--out", out_str, "output directory");
    sub_sweep->add_option("--seed", seed_opt, "master seed override");
    sub_sweep->add_option("--traj", traj_opt, "trajectory count override");
    sub_sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    const fs::path out_dir = out_str.empty() ? default_out_dir() : fs::path(out_str);
    try {
        if (sub_lambda->parsed()) {
            if (lambda_N < 1) {
                std::cerr << "lambda: N must be >= 1\n";
                return kExitConfig;
            }
            return cmd_lambda(lambda_N, lambda_tol);
        }
        if (sub_run->parsed() || sub_sweep->parsed()) {
            RunConfig rc;
            if (!preset_name.empty())
                rc = preset_config(preset_name);
            else if (!config_path.empty())
                rc = parse_config_file(config_path);
            else {
                std::cerr << "error: provide --config or --preset\n";
                return kExitConfig;
            }
            apply_overrides(rc, seed_opt, traj_opt);
            if (sub_run->parsed()) return cmd_run(rc, out_dir, threads);
            return cmd_sweep(rc, sweep_param, sweep_values, out_dir, threads);
        }
        if (sub_rep->parsed()) return cmd_reproduce(figure_id, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariant;
    }
    return 0;
}
