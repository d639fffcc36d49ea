// Measured quantities: populations, reduced photon state, generalized
// second-order correlation functions g_N^(2), density-matrix snapshots and
// Wigner functions.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nbundle/hilbert.hpp"
#include "nbundle/lindblad.hpp"
#include "nbundle/model.hpp"
#include "nbundle/timeseries.hpp"

namespace nbundle {

inline constexpr double kG2DenominatorFloor = 1e-12;

// Bare-basis populations, indexed [qubit][n].
inline Eigen::MatrixXd populations(const StateVec& psi, const FockTruncation& trunc) {
    const int P = trunc.photon_dim();
    Eigen::MatrixXd p(2, P);
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n < P; ++n) p(s, n) = std::norm(psi(composite_index(s, n, trunc)));
    return p;
}

inline Eigen::MatrixXd populations(const Op& rho, const FockTruncation& trunc) {
    const int P = trunc.photon_dim();
    Eigen::MatrixXd p(2, P);
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n < P; ++n) {
            const int i = composite_index(s, n, trunc);
            p(s, n) = rho(i, i).real();
        }
    return p;
}

// Dressed populations P_{|e,n~>} via the Franck-Condon change of basis.
inline std::vector<double> dressed_excited_populations(const Op& rho,
                                                       const FockTruncation& trunc,
                                                       const FranckCondonTable& fc) {
    const int P = trunc.photon_dim();
    std::vector<double> out(P, 0.0);
    for (int n = 0; n < P; ++n) {
        // |e,n~> = |e> (x) D(-beta)|n>, with <k|D(-beta)|n> = fc(n,k)
        StateVec v = StateVec::Zero(2 * P);
        for (int k = 0; k < P; ++k) v(composite_index(1, k, trunc)) = fc.table(n, k);
        out[n] = std::real(v.dot(rho * v));
    }
    return out;
}

// Partial trace over the qubit.
inline Op reduced_photon_state(const Op& rho, const FockTruncation& trunc) {
    const int P = trunc.photon_dim();
    return rho.topLeftCorner(P, P) + rho.bottomRightCorner(P, P);
}

// <b^dagN b^N> from the photon number distribution (diagonal in n).
inline double photon_moment(const Op& rho, const FockTruncation& trunc, int N) {
    const int P = trunc.photon_dim();
    double m = 0.0;
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n < P; ++n) {
            double f = 1.0;
            for (int j = 0; j < N; ++j) f *= std::max(0, n - j);
            const int i = composite_index(s, n, trunc);
            m += f * rho(i, i).real();
        }
    return m;
}

// g_N^(2)(t,t) = <b^dag2N b^2N> / <b^dagN b^N>^2 with the bare annihilation
// operator; nullopt when the denominator underflows the floor.
inline std::optional<double> g2_equal_time(const Op& rho, const FockTruncation& trunc,
                                           int N) {
    const double m1 = photon_moment(rho, trunc, N);
    if (m1 * m1 < kG2DenominatorFloor) return std::nullopt;
    const double m2 = photon_moment(rho, trunc, 2 * N);
    return m2 / (m1 * m1);
}

inline std::optional<double> g2_equal_time(const StateVec& psi,
                                           const FockTruncation& trunc, int N) {
    Op rho = psi * psi.adjoint();
    return g2_equal_time(rho, trunc, N);
}

// Same statistic computed with the displaced operator b + lambda sigma+sigma-.
inline std::optional<double> g2_equal_time_displaced(const Op& rho,
                                                     const SystemConfig& cfg, int N) {
    const Op o = dressed_lowering_op(cfg);
    Op oN = Op::Identity(o.rows(), o.cols());
    for (int j = 0; j < N; ++j) oN = Op(o * oN);
    const Op o2N = Op(oN * oN);
    const double m1 = std::real((Op(oN.adjoint() * oN) * rho).trace());
    if (m1 * m1 < kG2DenominatorFloor) return std::nullopt;
    const double m2 = std::real((Op(o2N.adjoint() * o2N) * rho).trace());
    return m2 / (m1 * m1);
}

// Quantum-regression evaluation of g_N^(2)(t1, t1+tau): the conditioned matrix
// o^N rho(t1) o^dagN propagates unnormalized under the same master equation.
// With displaced = true the statistic uses the emission-channel operator
// o = b + lambda sigma+sigma- (the operator the photon dissipator couples to);
// with false it uses bare b. The bare version carries O(lambda)-amplitude
// oscillations at the resonator frequency whenever the excited-state weight of
// the conditioned matrix is non-negligible, so the emission-channel form is
// the faithful one for photodetection statistics. Points whose denominator
// underflows are omitted.
inline TimeSeries g2_delayed(const DensityState& rho_t1,
                             const std::vector<double>& tau_grid, int N,
                             const SystemConfig& cfg, const DissipatorSet& diss,
                             const IntegratorSettings& settings,
                             bool displaced = false) {
    const int P = cfg.trunc.photon_dim();
    const Op o = displaced ? dressed_lowering_op(cfg)
                           : tensor(Op::Identity(2, 2), annihilation_op(cfg.trunc));
    Op oN = Op::Identity(2 * P, 2 * P);
    for (int j = 0; j < N; ++j) oN = Op(o * oN);
    const Op num_op = Op(oN.adjoint() * oN);
    auto moment = [&num_op](const Op& rho) {
        return std::real((num_op * rho).trace());
    };

    const double m1_t1 = moment(rho_t1.rho);
    TimeSeries out;
    auto& col = out.add_column("g2_" + std::to_string(N));
    if (m1_t1 * m1_t1 < kG2DenominatorFloor) return out;

    std::vector<double> times;
    for (double tau : tau_grid) times.push_back(rho_t1.time + tau);

    DensityState cond{Op(oN * rho_t1.rho * oN.adjoint()), rho_t1.time};

    // tau = 0 entries need no propagation
    MasterRhs rhs_cond(cfg, diss), rhs_unc(cfg, diss);
    Rk45Stepper<Op> cond_stepper(
        [&rhs_cond](double t, const Op& y, Op& dy) { rhs_cond(t, y, dy); }, cond.rho,
        cond.time, settings);
    Rk45Stepper<Op> unc_stepper(
        [&rhs_unc](double t, const Op& y, Op& dy) { rhs_unc(t, y, dy); }, rho_t1.rho,
        rho_t1.time, settings);

    for (double t : times) {
        cond_stepper.advance_to(t);
        unc_stepper.advance_to(t);
        const double num = moment(cond_stepper.state());
        const double m1_t2 = moment(unc_stepper.state());
        const double denom = m1_t1 * m1_t2;
        if (std::abs(denom) < kG2DenominatorFloor) continue;
        out.grid.push_back(t);
        col.push_back(num / denom);
    }
    return out;
}

// Argmax (or argmin) of a column over [window_lo, window_hi]; ties broken
// toward the earliest time.
inline double locate_extremum_time(const TimeSeries& series, const std::string& column,
                                   double window_lo, double window_hi,
                                   bool maximize = true) {
    const auto& col = series.column(column);
    bool found = false;
    double best_val = 0.0, best_t = 0.0;
    for (size_t i = 0; i < series.grid.size(); ++i) {
        const double t = series.grid[i];
        if (t < window_lo || t > window_hi) continue;
        const double v = maximize ? col[i] : -col[i];
        if (!found || v > best_val) {
            found = true;
            best_val = v;
            best_t = t;
        }
    }
    if (!found) throw std::invalid_argument("locate_extremum_time: empty window");
    return best_t;
}

struct WignerField {
    std::vector<double> re_axis;
    std::vector<double> im_axis;
    Eigen::MatrixXd values;  // values(i, j) = W(re_axis[j] + i*im_axis[i])
};

namespace detail {

// <m|D(alpha)|n> in closed form (generalized Laguerre), for the padded basis.
inline complexd coherent_displacement_element(int m, int n, complexd alpha) {
    const double x = std::norm(alpha);
    const int lo = std::min(m, n), d = std::abs(m - n);
    const double logpref = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + d + 1.0));
    complexd base = m >= n ? alpha : -std::conj(alpha);
    complexd powterm = 1.0;
    for (int j = 0; j < d; ++j) powterm *= base;
    return std::exp(logpref - 0.5 * x) * powterm * laguerre(lo, d, x);
}

inline Op coherent_displacement(complexd alpha, int dim) {
    Op u(dim, dim);
    for (int m = 0; m < dim; ++m)
        for (int n = 0; n < dim; ++n) u(m, n) = coherent_displacement_element(m, n, alpha);
    return u;
}

}  // namespace detail

// Displaced-parity Wigner function W(alpha) = (2/pi) Tr[D(-alpha) rho D(alpha) Pi],
// normalized so that the integral over the complex plane is 1. The photon
// state is zero-padded so truncation error stays below the grid tolerance.
inline WignerField wigner(const Op& rho_b, const std::vector<double>& re_axis,
                          const std::vector<double>& im_axis) {
    const int P = static_cast<int>(rho_b.rows());
    // pad so the parity-sum tail at the largest |alpha|^2 on the grid is
    // below 1e-8 (Poisson tail of the displaced basis states)
    double a2max = 0.0;
    for (double re : re_axis)
        for (double im : im_axis) a2max = std::max(a2max, re * re + im * im);
    const int D = std::max({2 * P, P + 20,
                            static_cast<int>(std::ceil(
                                a2max + 12.0 * std::sqrt(a2max + 1.0) + 10.0))});
    Op rho = Op::Zero(D, D);
    rho.topLeftCorner(P, P) = rho_b;

    WignerField f;
    f.re_axis = re_axis;
    f.im_axis = im_axis;
    f.values.resize(static_cast<long>(im_axis.size()), static_cast<long>(re_axis.size()));
    Eigen::VectorXd parity(D);
    for (int k = 0; k < D; ++k) parity(k) = (k % 2 == 0) ? 1.0 : -1.0;
    for (size_t i = 0; i < im_axis.size(); ++i) {
        for (size_t j = 0; j < re_axis.size(); ++j) {
            const complexd alpha(re_axis[j], im_axis[i]);
            const Op u = detail::coherent_displacement(alpha, D);
            const Op m = Op(u.adjoint() * rho * u);
            double w = 0.0;
            for (int k = 0; k < D; ++k) w += parity(k) * m(k, k).real();
            f.values(i, j) = (2.0 / M_PI) * w;
        }
    }
    return f;
}

inline std::vector<double> wigner_default_axis(int points = 101, double extent = 3.0) {
    std::vector<double> ax(points);
    for (int i = 0; i < points; ++i)
        ax[i] = -extent + 2.0 * extent * i / (points - 1);
    return ax;
}

struct DensitySnapshot {
    std::vector<std::string> labels;  // basis labels, |g,n> then |e,n>
    Eigen::MatrixXd magnitudes;      // |rho_ij|
};

inline DensitySnapshot density_snapshot(const Op& rho, const FockTruncation& trunc) {
    DensitySnapshot s;
    const int P = trunc.photon_dim();
    for (int q = 0; q < 2; ++q)
        for (int n = 0; n < P; ++n)
            s.labels.push_back(std::string(q == 0 ? "g" : "e") + std::to_string(n));
    s.magnitudes = rho.cwiseAbs();
    return s;
}

// Standard observable columns for a master-equation run.
inline TimeSeries observable_series(const std::vector<DensityState>& states,
                                    const SystemConfig& cfg) {
    TimeSeries ts;
    for (const auto& st : states) ts.grid.push_back(st.time);
    const int N = cfg.bundle_N;
    ts.columns.reserve(N + 6);  // references below must stay valid
    std::vector<std::vector<double>*> pg;
    for (int n = 0; n <= N; ++n) pg.push_back(&ts.add_column("P_g" + std::to_string(n)));
    auto& pe = ts.add_column("P_e");
    auto& nph = ts.add_column("n_photon");
    auto& m1 = ts.add_column("m1");
    auto& m2 = ts.add_column("m2");
    auto& trace_drift = ts.add_column("trace_drift");
    for (size_t i = 0; i < states.size(); ++i) {
        const auto p = populations(states[i].rho, cfg.trunc);
        for (int n = 0; n <= N; ++n) (*pg[n])[i] = p(0, n);
        pe[i] = p.row(1).sum();
        nph[i] = photon_moment(states[i].rho, cfg.trunc, 1);
        m1[i] = photon_moment(states[i].rho, cfg.trunc, N);
        m2[i] = photon_moment(states[i].rho, cfg.trunc, 2 * N);
        trace_drift[i] = std::abs(states[i].rho.trace().real() - 1.0);
    }
    ts.validate();
    return ts;
}

}  // namespace nbundle
