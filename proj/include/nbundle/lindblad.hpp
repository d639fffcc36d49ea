// Dressed-state master equation: right-hand side and time integration.
//
// Zero-temperature collapse channels are sqrt(kappa) * (b + lambda sigma+sigma-)
// and sqrt(gamma) * sigma-. The thermal variant adds the upward channels and
// the resonator-bath dephasing term.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "nbundle/hilbert.hpp"
#include "nbundle/integrate.hpp"
#include "nbundle/model.hpp"

namespace nbundle {

enum class BathVariant { zero_temp, thermal };

struct DissipatorSet {
    struct Channel {
        Op c;         // collapse operator
        double rate;  // non-negative prefactor of L[c]
        bool photon_channel;  // true for resonator emission channels
    };
    std::vector<Channel> channels;
    BathVariant variant = BathVariant::zero_temp;
    double T_b = 0.0, T_sigma = 0.0;
};

// Photon-side collapse operator b + lambda sigma+ sigma- on the composite space.
inline Op dressed_lowering_op(const SystemConfig& cfg) {
    const auto q = qubit_ops();
    const Op idp = Op::Identity(cfg.trunc.photon_dim(), cfg.trunc.photon_dim());
    return tensor(Op::Identity(2, 2), annihilation_op(cfg.trunc)) +
           cfg.lambda * tensor(q.sigma_ee, idp);
}

inline DissipatorSet zero_temp_dissipators(const SystemConfig& cfg) {
    const auto q = qubit_ops();
    const Op idp = Op::Identity(cfg.trunc.photon_dim(), cfg.trunc.photon_dim());
    DissipatorSet d;
    d.channels.push_back({dressed_lowering_op(cfg), cfg.kappa, true});
    d.channels.push_back({tensor(q.sigma_minus, idp), cfg.gamma, false});
    return d;
}

inline double bose_occupation(double omega, double temperature) {
    if (!(temperature > 0)) throw std::invalid_argument("bose_occupation: T must be > 0");
    return 1.0 / std::expm1(omega / temperature);
}

// Finite-temperature dissipator set: resonator bath contributes
// kappa(nbar+1) L[b + lambda P_e], kappa nbar L[b^dag + lambda P_e] and the
// dephasing term 4 kappa (k_B T_b) lambda^2 L[sigma+sigma-]; the qubit bath
// contributes gamma(nbar0+1) L[sigma-] and gamma nbar0 L[sigma+]. The dressed
// qubit operators reduce to bare sigma-+ in the Schroedinger picture, which is
// exact at T=0 and an approximation for T>0.
inline DissipatorSet thermal_dissipators(const SystemConfig& cfg, double T_b,
                                         double T_sigma) {
    if (!(T_b > 0) || !(T_sigma > 0))
        throw std::invalid_argument("thermal_dissipators: temperatures must be > 0");
    const auto q = qubit_ops();
    const Op idp = Op::Identity(cfg.trunc.photon_dim(), cfg.trunc.photon_dim());
    const double nbar_b = bose_occupation(1.0, T_b);
    const double nbar_0 = bose_occupation(cfg.omega0 > 0 ? cfg.omega0 : 1.0, T_sigma);
    const Op low = dressed_lowering_op(cfg);
    DissipatorSet d;
    d.variant = BathVariant::thermal;
    d.T_b = T_b;
    d.T_sigma = T_sigma;
    d.channels.push_back({low, cfg.kappa * (nbar_b + 1.0), true});
    d.channels.push_back({low.adjoint(), cfg.kappa * nbar_b, false});
    d.channels.push_back({tensor(q.sigma_ee, idp),
                          4.0 * cfg.kappa * T_b * cfg.lambda * cfg.lambda, false});
    d.channels.push_back({tensor(q.sigma_minus, idp), cfg.gamma * (nbar_0 + 1.0), false});
    d.channels.push_back({tensor(q.sigma_plus, idp), cfg.gamma * nbar_0, false});
    return d;
}

// L[c] rho = (2 c rho c^dag - c^dag c rho - rho c^dag c) / 2, without rate.
inline Op dissipator(const Op& rho, const Op& c) {
    if (rho.rows() != c.rows()) throw std::invalid_argument("dissipator: dimension mismatch");
    const Op cdc = c.adjoint() * c;
    return c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
}

// Reference (dense) right-hand side: drho/dt = i[rho,H] + sum_k rate_k L[c_k] rho.
inline Op me_rhs(double t, const Op& rho, const SystemConfig& cfg,
                 const DissipatorSet& diss) {
    if (rho.rows() != cfg.trunc.dim())
        throw std::invalid_argument("me_rhs: dimension mismatch");
    const Op h = hamiltonian_lab(t, cfg);
    Op out = complexd(0, 1) * (rho * h - h * rho);
    for (const auto& ch : diss.channels)
        if (ch.rate != 0.0) out += ch.rate * dissipator(rho, ch.c);
    return out;
}

inline Op me_rhs_thermal(double t, const Op& rho, const SystemConfig& cfg, double T_b,
                         double T_sigma) {
    return me_rhs(t, rho, cfg, thermal_dissipators(cfg, T_b, T_sigma));
}

// Fast structured evaluation of the zero-temperature RHS. Exploits the
// qubit-block structure of H0 and of the collapse operators, and Hermiticity
// of every RK stage input, so the hot path is four PxP products per stage.
// Verified against me_rhs() entrywise in the test suite.
class MasterRhs {
  public:
    MasterRhs(const SystemConfig& cfg, const DissipatorSet& diss) : cfg_(cfg) {
        generic_ = diss.variant != BathVariant::zero_temp;
        diss_ = diss;
        const int P = cfg.trunc.photon_dim();
        P_ = P;
        const Op b = annihilation_op(cfg.trunc);
        const Op nph = Op(b.adjoint() * b);
        const Op x = Op(b + b.adjoint());
        const complexd mihalf(0, -0.5);
        // A = H(t) - (i/2) sum_k rate_k c_k^dag c_k is qubit-block diagonal up
        // to the drive; Cg/Ce are its static g/e photon-space blocks.
        Cg_ = nph + mihalf * cfg.kappa * nph;
        Ce_ = nph + cfg.lambda * x +
              mihalf * (cfg.kappa * (nph + cfg.lambda * x +
                                     cfg.lambda * cfg.lambda * Op::Identity(P, P)) +
                        cfg.gamma * Op::Identity(P, P));
        if (generic_) {
            a0_ = h0_operator(cfg);
            for (const auto& ch : diss_.channels)
                a0_ += mihalf * ch.rate * Op(ch.c.adjoint() * ch.c);
        }
        m_.resize(2 * P, 2 * P);
        q_.resize(2 * P, 2 * P);
    }

    void operator()(double t, const Op& rho_in, Op& out) {
        // The shortcut rho A^dag = (A rho)^dag below requires Hermitian input.
        // Stage values carry a tiny non-Hermitian round-off component which,
        // fed through the shortcut, would obey an anticommutator equation with
        // exponentially growing modes (rates up to half the spread of the
        // damping spectrum). Projecting it out keeps the map linear and
        // contractive, so that component stays at the round-off floor.
        herm_ = 0.5 * (rho_in + rho_in.adjoint().eval());
        const Op& rho = herm_;
        if (generic_) {
            generic_rhs(t, rho, out);
            return;
        }
        const int P = P_;
        const complexd u = drive_coefficient(t, cfg_);
        const complexd uc = std::conj(u);
        const auto gg = rho.topLeftCorner(P, P);
        const auto ge = rho.topRightCorner(P, P);
        const auto eg = rho.bottomLeftCorner(P, P);
        const auto ee = rho.bottomRightCorner(P, P);

        // M = A(t) rho, with the drive entering as block moves.
        m_.topLeftCorner(P, P).noalias() = Cg_ * gg;
        m_.topLeftCorner(P, P).noalias() += uc * eg;
        m_.topRightCorner(P, P).noalias() = Cg_ * ge;
        m_.topRightCorner(P, P).noalias() += uc * ee;
        m_.bottomLeftCorner(P, P).noalias() = Ce_ * eg;
        m_.bottomLeftCorner(P, P).noalias() += u * gg;
        m_.bottomRightCorner(P, P).noalias() = Ce_ * ee;
        m_.bottomRightCorner(P, P).noalias() += u * ge;

        // -i (M - M^dag); rho A^dag = (A rho)^dag for Hermitian stage input.
        out = complexd(0, -1) * (m_ - m_.adjoint().eval());

        // kappa O rho O^dag with O = b + lambda sigma+sigma-.
        apply_lowering_left(rho, q_);
        apply_raising_right(q_, m_);
        out.noalias() += cfg_.kappa * m_;
        // gamma sigma- rho sigma+.
        out.topLeftCorner(P, P).noalias() += cfg_.gamma * ee;
    }

  private:
    void apply_lowering_left(const Op& x, Op& out) const {
        const int P = P_, d = 2 * P;
        out.setZero();
        for (int s = 0; s < 2; ++s)
            for (int n = 0; n + 1 < P; ++n)
                out.row(s * P + n) = std::sqrt(n + 1.0) * x.row(s * P + n + 1);
        out.bottomRows(P) += cfg_.lambda * x.bottomRows(P);
        (void)d;
    }

    void apply_raising_right(const Op& x, Op& out) const {
        const int P = P_;
        out.setZero();
        for (int s = 0; s < 2; ++s)
            for (int n = 0; n + 1 < P; ++n)
                out.col(s * P + n) = std::sqrt(n + 1.0) * x.col(s * P + n + 1);
        out.rightCols(P) += cfg_.lambda * x.rightCols(P);
    }

    void generic_rhs(double t, const Op& rho, Op& out) {
        const int P = P_;
        const complexd u = drive_coefficient(t, cfg_);
        m_.noalias() = a0_ * rho;
        m_.bottomRows(P).noalias() += u * rho.topRows(P);
        m_.topRows(P).noalias() += std::conj(u) * rho.bottomRows(P);
        out = complexd(0, -1) * (m_ - m_.adjoint().eval());
        for (const auto& ch : diss_.channels) {
            if (ch.rate == 0.0) continue;
            q_.noalias() = ch.c * rho;
            out.noalias() += ch.rate * (q_ * ch.c.adjoint());
        }
    }

    SystemConfig cfg_;
    DissipatorSet diss_;
    bool generic_ = false;
    int P_ = 0;
    Op Cg_, Ce_, a0_;
    Op m_, q_, herm_;
};

struct EvolveOptions {
    bool check_invariants = true;
    // The master equation preserves the trace exactly; projecting back onto
    // the trace-1 subspace after each accepted step removes the secular part
    // of the integration error (Hermiticity is preserved by construction).
    bool project_trace = true;
    double herm_tol = 1e-10;
    double trace_tol = 1e-8;
    double eig_floor = -1e-8;
};

// Propagates rho0, invoking the callback with the state exactly at each grid
// time. Every emitted state is re-checked against the DensityState invariants.
inline void evolve_master_stream(const DensityState& rho0,
                                 const std::vector<double>& grid,
                                 const SystemConfig& cfg, const DissipatorSet& diss,
                                 const IntegratorSettings& settings,
                                 const std::function<void(const DensityState&)>& emit,
                                 const EvolveOptions& opts = {}) {
    if (grid.empty()) return;
    for (size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw std::invalid_argument("evolve_master: grid must be strictly increasing");
    MasterRhs rhs(cfg, diss);
    Rk45Stepper<Op> stepper(
        [&rhs](double t, const Op& y, Op& dydt) { rhs(t, y, dydt); }, rho0.rho,
        rho0.time, settings);
    for (double tg : grid) {
        while (stepper.time() < tg) {
            stepper.step_once(tg);
            if (opts.project_trace)
                stepper.rescale(1.0 / stepper.state().trace().real());
        }
        DensityState st{stepper.state(), tg};
        if (opts.check_invariants) {
            const auto c = check_density_state(st.rho, opts.herm_tol, opts.trace_tol,
                                               opts.eig_floor);
            if (!c.ok)
                throw std::runtime_error(
                    "evolve_master: density-state invariant violated at t=" +
                    std::to_string(tg) + " (herm=" + std::to_string(c.herm_violation) +
                    ", trace_drift=" + std::to_string(c.trace_drift) +
                    ", min_eig=" + std::to_string(c.min_eigenvalue) + ")");
        }
        emit(st);
    }
}

// As above, collecting the emitted states.
inline std::vector<DensityState> evolve_master(const DensityState& rho0,
                                               const std::vector<double>& grid,
                                               const SystemConfig& cfg,
                                               const DissipatorSet& diss,
                                               const IntegratorSettings& settings,
                                               const EvolveOptions& opts = {}) {
    std::vector<DensityState> out;
    out.reserve(grid.size());
    evolve_master_stream(rho0, grid, cfg, diss, settings,
                         [&out](const DensityState& st) { out.push_back(st); }, opts);
    return out;
}

}  // namespace nbundle
