// Monte-Carlo wavefunction unraveling of the master equation: deterministic
// non-Hermitian evolution punctuated by quantum jumps, with seeded,
// order-independent parallel ensembles.

#pragma once

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nbundle/hilbert.hpp"
#include "nbundle/integrate.hpp"
#include "nbundle/lindblad.hpp"
#include "nbundle/model.hpp"
#include "nbundle/rng.hpp"
#include "nbundle/timeseries.hpp"

namespace nbundle {

// H(t) - (i/2) sum_k rate_k c_k^dag c_k (dense; tests and reference use).
inline Op effective_hamiltonian(double t, const SystemConfig& cfg,
                                const DissipatorSet& diss) {
    Op h = hamiltonian_lab(t, cfg);
    for (const auto& ch : diss.channels)
        h -= complexd(0, 0.5) * ch.rate * Op(ch.c.adjoint() * ch.c);
    return h;
}

// dpsi/dt = -i H_eff(t) psi, structured for the zero-temperature channel set.
class EffectiveRhs {
  public:
    EffectiveRhs(const SystemConfig& cfg, const DissipatorSet& diss) : cfg_(cfg) {
        P_ = cfg.trunc.photon_dim();
        generic_ = diss.variant != BathVariant::zero_temp;
        const Op b = annihilation_op(cfg.trunc);
        const Op nph = Op(b.adjoint() * b);
        const Op x = Op(b + b.adjoint());
        const complexd mihalf(0, -0.5);
        Cg_ = nph + mihalf * cfg.kappa * nph;
        Ce_ = nph + cfg.lambda * x +
              mihalf * (cfg.kappa * (nph + cfg.lambda * x +
                                     cfg.lambda * cfg.lambda * Op::Identity(P_, P_)) +
                        cfg.gamma * Op::Identity(P_, P_));
        if (generic_) {
            a0_ = h0_operator(cfg);
            for (const auto& ch : diss.channels)
                a0_ += mihalf * ch.rate * Op(ch.c.adjoint() * ch.c);
        }
    }

    void operator()(double t, const StateVec& psi, StateVec& out) const {
        const complexd u = drive_coefficient(t, cfg_);
        if (generic_) {
            out.noalias() = a0_ * psi;
            out.head(P_).noalias() += std::conj(u) * psi.tail(P_);
            out.tail(P_).noalias() += u * psi.head(P_);
        } else {
            out.head(P_).noalias() = Cg_ * psi.head(P_);
            out.head(P_).noalias() += std::conj(u) * psi.tail(P_);
            out.tail(P_).noalias() = Ce_ * psi.tail(P_);
            out.tail(P_).noalias() += u * psi.head(P_);
        }
        out *= complexd(0, -1);
    }

  private:
    SystemConfig cfg_;
    int P_ = 0;
    bool generic_ = false;
    Op Cg_, Ce_, a0_;
};

struct Jump {
    double time;
    int channel;
};

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::vector<Jump> jumps;
    TimeSeries observables;
    PureState final_state;
    std::vector<PureState> captured_states;  // at requested capture times
};

namespace detail {

// Standard observable columns sampled along every trajectory.
inline std::vector<std::string> trajectory_columns(const SystemConfig& cfg) {
    std::vector<std::string> names;
    for (int n = 0; n <= cfg.bundle_N; ++n) names.push_back("P_g" + std::to_string(n));
    names.push_back("P_e");
    names.push_back("n_photon");
    names.push_back("m1");  // <b^dagN b^N>
    names.push_back("m2");  // <b^dag2N b^2N>
    return names;
}

inline void sample_observables(const StateVec& psi_normalized, const SystemConfig& cfg,
                               std::vector<double>& row) {
    const int P = cfg.trunc.photon_dim();
    const int N = cfg.bundle_N;
    row.assign(N + 5, 0.0);
    // photon number distribution p_n = sum_s |psi(s,n)|^2
    std::vector<double> pn(P, 0.0);
    double pe = 0.0;
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n < P; ++n) {
            const double w = std::norm(psi_normalized(s * P + n));
            pn[n] += w;
            if (s == 1) pe += w;
        }
    for (int n = 0; n <= N; ++n) row[n] = std::norm(psi_normalized(n));  // P_{|g,n>}
    row[N + 1] = pe;
    double nbar = 0.0, m1 = 0.0, m2 = 0.0;
    for (int n = 0; n < P; ++n) {
        nbar += n * pn[n];
        double f1 = 1.0, f2 = 1.0;
        for (int j = 0; j < N; ++j) f1 *= (n - j > 0 ? n - j : 0);
        for (int j = 0; j < 2 * N; ++j) f2 *= (n - j > 0 ? n - j : 0);
        m1 += f1 * pn[n];
        m2 += f2 * pn[n];
    }
    row[N + 2] = nbar;
    row[N + 3] = m1;
    row[N + 4] = m2;
}

}  // namespace detail

struct TrajectoryOptions {
    double jump_time_tol = 1e-3;
    double jump_norm_tol = 1e-6;  // on |  ||psi||^2 - r  |
    std::vector<double> capture_times;
};

// One MCWF realization over the output grid. Fully reproducible from the seed.
inline TrajectoryRecord run_trajectory(const PureState& psi0,
                                       const std::vector<double>& grid,
                                       const SystemConfig& cfg,
                                       const DissipatorSet& diss, std::uint64_t seed,
                                       const IntegratorSettings& settings = {},
                                       const TrajectoryOptions& opts = {}) {
    if (grid.empty()) throw std::invalid_argument("run_trajectory: empty grid");
    if (std::abs(psi0.psi.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("run_trajectory: psi0 must be normalized");

    EffectiveRhs rhs(cfg, diss);
    SplitMix64 rng(seed);
    TrajectoryRecord rec;
    rec.seed = seed;
    rec.observables.grid = grid;
    const auto names = detail::trajectory_columns(cfg);
    for (const auto& n : names) rec.observables.add_column(n);

    // merged stop times: grid plus capture instants
    std::vector<double> stops = grid;
    stops.insert(stops.end(), opts.capture_times.begin(), opts.capture_times.end());
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    Rk45Stepper<StateVec> stepper(
        [&rhs](double t, const StateVec& y, StateVec& dy) { rhs(t, y, dy); }, psi0.psi,
        grid.front(), settings);

    double threshold = rng.uniform();
    StateVec psi_prev = psi0.psi;
    StateVec scratch = psi0.psi;
    std::vector<double> row;
    size_t gi = 0;

    auto emit_if_grid_time = [&](double t) {
        while (gi < grid.size() && std::abs(grid[gi] - t) < 1e-12) {
            scratch = stepper.state();
            scratch.normalize();
            detail::sample_observables(scratch, cfg, row);
            for (size_t c = 0; c < names.size(); ++c)
                rec.observables.columns[c].second[gi] = row[c];
            ++gi;
        }
        for (double tc : opts.capture_times)
            if (std::abs(tc - t) < 1e-12) {
                scratch = stepper.state();
                scratch.normalize();
                rec.captured_states.push_back({scratch, t});
            }
    };

    auto handle_jump = [&](double t_lo, const StateVec& y_lo, double t_hi) {
        // Bisect on ||psi(t)||^2 - threshold, re-integrating the subinterval
        // from the step-start state; the norm is monotone along H_eff.
        double lo = t_lo, hi = t_hi;
        StateVec y_mid = y_lo;
        double t_jump = hi;
        StateVec y_jump = stepper.state();
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            y_mid = y_lo;
            double tcur = t_lo;
            rk45_integrate([&rhs](double t, const StateVec& y, StateVec& dy) {
                               rhs(t, y, dy);
                           },
                           y_mid, tcur, mid, settings);
            const double f = y_mid.squaredNorm() - threshold;
            if (f >= 0)
                lo = mid;
            else
                hi = mid;
            t_jump = mid;
            y_jump = y_mid;
            if (hi - lo < opts.jump_time_tol && std::abs(f) < 0.5 * opts.jump_norm_tol)
                break;
            if (hi - lo < 1e-10) break;
        }
        // channel selection proportional to rate_k || c_k psi ||^2
        std::vector<double> weights(diss.channels.size(), 0.0);
        double wsum = 0.0;
        for (size_t k = 0; k < diss.channels.size(); ++k) {
            if (diss.channels[k].rate > 0)
                weights[k] = diss.channels[k].rate * (diss.channels[k].c * y_jump).squaredNorm();
            wsum += weights[k];
        }
        if (!(wsum > 0)) throw std::runtime_error("run_trajectory: zero total jump rate at threshold crossing");
        double u = rng.uniform() * wsum;
        int channel = 0;
        for (size_t k = 0; k < weights.size(); ++k) {
            if (u < weights[k] || k + 1 == weights.size()) {
                channel = static_cast<int>(k);
                break;
            }
            u -= weights[k];
        }
        StateVec y_after = diss.channels[channel].c * y_jump;
        y_after.normalize();
        rec.jumps.push_back({t_jump, channel});
        stepper.reset_state(y_after, t_jump);
        threshold = rng.uniform();
    };

    for (double target : stops) {
        while (stepper.time() < target) {
            const double t_prev = stepper.time();
            psi_prev = stepper.state();
            stepper.step_once(target);
            const double n2 = stepper.state().squaredNorm();
            if (n2 < 1e-300)
                throw std::runtime_error("run_trajectory: norm underflow without threshold crossing");
            if (n2 < threshold) handle_jump(t_prev, psi_prev, stepper.time());
        }
        emit_if_grid_time(target);
    }

    scratch = stepper.state();
    scratch.normalize();
    rec.final_state = {scratch, stepper.time()};
    rec.observables.validate();
    return rec;
}

struct EnsembleResult {
    int n_traj = 0;
    TimeSeries mean;
    TimeSeries std_error;
    std::vector<long> jump_counts;               // per channel, summed
    std::vector<std::vector<Jump>> trajectory_jumps;  // per trajectory
};

// Seeded parallel ensemble; trajectory k uses derive_stream_seed(master, k).
// Aggregation runs in index order after all workers finish, so the result is
// independent of worker count and scheduling.
inline EnsembleResult run_ensemble(const PureState& psi0, const std::vector<double>& grid,
                                   const SystemConfig& cfg, const DissipatorSet& diss,
                                   int n_traj, std::uint64_t master_seed,
                                   const IntegratorSettings& settings = {},
                                   int n_threads = 0,
                                   const TrajectoryOptions& opts = {}) {
    if (n_traj < 1) throw std::invalid_argument("run_ensemble: n_traj must be >= 1");
    if (n_threads <= 0)
        n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, n_traj);

    std::vector<TrajectoryRecord> records(n_traj);
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(n_threads);
    for (int w = 0; w < n_threads; ++w) {
        workers.emplace_back([&, w]() {
            try {
                for (;;) {
                    const int k = next.fetch_add(1);
                    if (k >= n_traj) break;
                    records[k] = run_trajectory(psi0, grid, cfg, diss,
                                                derive_stream_seed(master_seed, k),
                                                settings, opts);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    EnsembleResult res;
    res.n_traj = n_traj;
    res.mean.grid = grid;
    res.std_error.grid = grid;
    res.jump_counts.assign(diss.channels.size(), 0);
    const size_t ncols = records[0].observables.columns.size();
    const size_t npts = grid.size();
    for (size_t c = 0; c < ncols; ++c) {
        const auto& name = records[0].observables.columns[c].first;
        auto& mean = res.mean.add_column(name);
        auto& se = res.std_error.add_column(name);
        for (size_t i = 0; i < npts; ++i) {
            double sum = 0.0, sumsq = 0.0;
            for (int k = 0; k < n_traj; ++k) {
                const double x = records[k].observables.columns[c].second[i];
                sum += x;
                sumsq += x * x;
            }
            const double m = sum / n_traj;
            mean[i] = m;
            if (n_traj > 1) {
                const double var = std::max(0.0, (sumsq - n_traj * m * m) / (n_traj - 1));
                se[i] = std::sqrt(var / n_traj);
            }
        }
    }
    res.trajectory_jumps.reserve(n_traj);
    for (auto& r : records) {
        for (const auto& j : r.jumps) res.jump_counts[j.channel]++;
        res.trajectory_jumps.push_back(std::move(r.jumps));
    }
    return res;
}

}  // namespace nbundle
