// Physics of the driven longitudinally-coupled qubit-resonator model.
//
// Units: omega_b = 1 everywhere (hbar = 1); every parameter is a dimensionless
// ratio. For a concrete device, omega_b = 2*pi*5 GHz maps lambda ~ 0.765 to
// about 2*pi*3.8 GHz and kappa ~ 0.0006 to about 2*pi*3 MHz.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nbundle/hilbert.hpp"

namespace nbundle {

struct PulseSchedule {
    double omega_0_amp = 0.05;  // Omega_0
    double sigma = 180.0;       // Gaussian width parameter
    double t1 = 1000.0;         // peak time of pulse 1
    double t2 = 750.0;          // peak time of pulse 2 (precedes t1: counterintuitive order)
    double period = 10000.0;    // T between consecutive pulses
    int n_pulses = 1;           // N0 + 1

    void validate() const {
        if (sigma <= 0) throw std::invalid_argument("pulses: sigma must be > 0");
        if (n_pulses < 1) throw std::invalid_argument("pulses: count must be >= 1");
        if (n_pulses > 1 && period <= 0)
            throw std::invalid_argument("pulses: period must be > 0 when count > 1");
    }
};

struct SystemConfig {
    double lambda = 0.765;   // lambda / omega_b
    double omega0 = 0.0;     // omega_0 / omega_b, used only by the thermal dissipators
    double kappa = 0.0;      // resonator decay rate
    double gamma = 0.0;      // qubit decay rate
    std::optional<double> delta1;  // defaults to -lambda^2
    std::optional<double> delta2;  // defaults to -lambda^2 - 1
    PulseSchedule pulses;
    FockTruncation trunc{12};
    int bundle_N = 2;

    void validate() const {
        if (!(lambda >= 0) || !std::isfinite(lambda))
            throw std::invalid_argument("model: lambda must be finite and >= 0");
        if (kappa < 0 || gamma < 0)
            throw std::invalid_argument("model: decay rates must be >= 0");
        if (bundle_N < 1) throw std::invalid_argument("model: bundle_N must be >= 1");
        if (bundle_N > trunc.n_max)
            throw std::invalid_argument("model: bundle_N must be <= n_max");
        pulses.validate();
    }

    double delta1_value() const { return delta1 ? *delta1 : -lambda * lambda; }
    double delta2_value() const { return delta2 ? *delta2 : -lambda * lambda - 1.0; }

    // Condition for dropping the off-resonant transitions is Omega_0 << omega_b.
    bool drive_strength_warning() const { return pulses.omega_0_amp > 0.2; }
};

// Associated Laguerre polynomial L_n^a(x) by the stable three-term recurrence.
inline double laguerre(int n, int a, double x) {
    if (n == 0) return 1.0;
    double lm2 = 1.0;
    double lm1 = 1.0 + a - x;
    for (int k = 2; k <= n; ++k) {
        double lk = ((2.0 * k - 1.0 + a - x) * lm1 - (k - 1.0 + a) * lm2) / k;
        lm2 = lm1;
        lm1 = lk;
    }
    return lm1;
}

// Franck-Condon overlap <n~|m> = <n|D(beta)|m> for the displaced Fock basis.
// Factorial ratios go through lgamma so n,m up to ~60 stay finite.
inline double franck_condon(int n, int m, double beta) {
    if (n < 0 || m < 0) throw std::invalid_argument("franck_condon: n,m must be >= 0");
    if (!std::isfinite(beta)) throw std::invalid_argument("franck_condon: beta must be finite");
    if (beta == 0.0) return n == m ? 1.0 : 0.0;
    const int lo = std::min(n, m), hi = std::max(n, m), d = hi - lo;
    const double logpref = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0));
    const double x = beta * beta;
    double val = std::exp(logpref - 0.5 * x + d * std::log(std::abs(beta))) *
                 laguerre(lo, d, x);
    if (n <= m && beta > 0 && d % 2 != 0) val = -val;  // (-beta)^{m-n} branch
    if (n > m && beta < 0 && d % 2 != 0) val = -val;   // beta^{n-m} branch
    return val;
}

struct FranckCondonTable {
    double beta = 0.0;
    Eigen::MatrixXd table;  // table(n, m) = <n~|m>

    FranckCondonTable() = default;
    FranckCondonTable(double beta_, const FockTruncation& trunc) : beta(beta_) {
        const int p = trunc.photon_dim();
        table.resize(p, p);
        for (int n = 0; n < p; ++n)
            for (int m = 0; m < p; ++m) table(n, m) = franck_condon(n, m, beta_);
    }
};

// Smallest positive beta with e^{-beta^2/2} L_N(beta^2) = 0, i.e. the square
// root of the smallest zero of the Laguerre polynomial L_N. Scan in x = beta^2
// with step 0.01, then bisect.
inline double lambda_n(int N, double tol = 1e-9) {
    if (N < 1) throw std::invalid_argument("lambda_n: N must be >= 1");
    if (!(tol > 0)) throw std::invalid_argument("lambda_n: tol must be > 0");
    const double step = 0.01;
    double a = 0.0, fa = laguerre(N, 0, 0.0);
    double b = 0.0, fb = fa;
    bool bracketed = false;
    for (int i = 1; i <= 100000; ++i) {
        b = i * step;
        fb = laguerre(N, 0, b);
        if (fa * fb <= 0.0) {
            bracketed = true;
            break;
        }
        a = b;
        fa = fb;
    }
    if (!bracketed) throw std::runtime_error("lambda_n: failed to bracket a sign change");
    while (std::sqrt(b) - std::sqrt(a) > tol) {
        const double mid = 0.5 * (a + b);
        const double fm = laguerre(N, 0, mid);
        if (fa * fm <= 0.0) {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    return std::sqrt(0.5 * (a + b));
}

// Omega_i(t): sum of Gaussians, exact (no windowing).
inline double pulse_amplitude(double t, int which, const PulseSchedule& sched) {
    if (which != 1 && which != 2)
        throw std::invalid_argument("pulse_amplitude: which must be 1 or 2");
    const double ti = which == 1 ? sched.t1 : sched.t2;
    double sum = 0.0;
    for (int m = 0; m < sched.n_pulses; ++m) {
        const double u = (t - ti - m * sched.period) / sched.sigma;
        sum += std::exp(-0.5 * u * u);
    }
    return sched.omega_0_amp * sum;
}

// Resonance conditions: Delta_1 = -lambda^2, Delta_2 = -lambda^2 - 1.
inline std::pair<double, double> resonance_detunings(const SystemConfig& cfg) {
    const double l2 = cfg.lambda * cfg.lambda;
    return {-l2, -l2 - 1.0};
}

// Eigenvalues of H0 = b^dag b + lambda sigma+ sigma- (b^dag + b) in the
// rotating frame (omega_0 dropped): E_{g,n} = n, E_{e,n} = n - lambda^2.
inline std::pair<double, double> h0_eigen(int n, const SystemConfig& cfg) {
    if (n < 0) throw std::invalid_argument("h0_eigen: n must be >= 0");
    return {static_cast<double>(n), n - cfg.lambda * cfg.lambda};
}

// Complex drive coefficient multiplying sigma+ (x) I at time t.
inline complexd drive_coefficient(double t, const SystemConfig& cfg) {
    const complexd i1(0.0, -cfg.delta1_value() * t);
    const complexd i2(0.0, -cfg.delta2_value() * t);
    return pulse_amplitude(t, 1, cfg.pulses) * std::exp(i1) +
           pulse_amplitude(t, 2, cfg.pulses) * std::exp(i2);
}

// Static part H0 on the composite space.
inline Op h0_operator(const SystemConfig& cfg) {
    const auto q = qubit_ops();
    const Op b = annihilation_op(cfg.trunc);
    const Op id2 = Op::Identity(2, 2);
    return tensor(id2, Op(b.adjoint() * b)) +
           cfg.lambda * tensor(q.sigma_ee, Op(b + b.adjoint()));
}

// Full rotating-frame Hamiltonian: H0 plus the two-tone qubit drive.
inline Op hamiltonian_lab(double t, const SystemConfig& cfg) {
    const auto q = qubit_ops();
    const Op idp = Op::Identity(cfg.trunc.photon_dim(), cfg.trunc.photon_dim());
    const complexd u = drive_coefficient(t, cfg);
    Op h = h0_operator(cfg);
    h += u * tensor(q.sigma_plus, idp) + std::conj(u) * tensor(q.sigma_minus, idp);
    return h;
}

// Chain basis for the approximate Hamiltonian, dimension 2N+1:
// |g,0>, |e,0~>, |g,1>, |e,1~>, ..., |e,(N-1)~>, |g,N>.
inline int chain_g_index(int n) { return 2 * n; }
inline int chain_e_index(int n) { return 2 * n + 1; }

// Resonant transition-chain Hamiltonian in its own closed chain basis.
// Couplings Omega_1(t) <n~|n> between |g,n> and |e,n~>, and
// Omega_2(t) <n~|n+1> between |e,n~> and |g,n+1>, for n = 0..N-1.
inline Op hamiltonian_approx(double t, const SystemConfig& cfg,
                             const FranckCondonTable& fc) {
    const int N = cfg.bundle_N;
    if (N > cfg.trunc.n_max)
        throw std::invalid_argument("hamiltonian_approx: bundle_N exceeds n_max");
    const double o1 = pulse_amplitude(t, 1, cfg.pulses);
    const double o2 = pulse_amplitude(t, 2, cfg.pulses);
    Op h = Op::Zero(2 * N + 1, 2 * N + 1);
    for (int n = 0; n < N; ++n) {
        const double c1 = o1 * fc.table(n, n);
        const double c2 = o2 * fc.table(n, n + 1);
        h(chain_e_index(n), chain_g_index(n)) += c1;
        h(chain_g_index(n), chain_e_index(n)) += c1;
        h(chain_e_index(n), chain_g_index(n + 1)) += c2;
        h(chain_g_index(n + 1), chain_e_index(n)) += c2;
    }
    return h;
}

// Embed a chain-basis state into the composite space; |e,n~> columns are
// D(-lambda)|n> built from the Franck-Condon table.
inline StateVec chain_to_composite(const StateVec& chain, const SystemConfig& cfg,
                                   const FranckCondonTable& fc) {
    const int N = cfg.bundle_N;
    const int p = cfg.trunc.photon_dim();
    StateVec out = StateVec::Zero(cfg.trunc.dim());
    for (int n = 0; n <= N; ++n)
        out(composite_index(0, n, cfg.trunc)) += chain(chain_g_index(n));
    for (int n = 0; n < N; ++n) {
        const complexd a = chain(chain_e_index(n));
        // <k|D(-beta)|n> = <n|D(beta)|k> = fc(n, k)
        for (int k = 0; k < p; ++k)
            out(composite_index(1, k, cfg.trunc)) += a * fc.table(n, k);
    }
    return out;
}

}  // namespace nbundle
