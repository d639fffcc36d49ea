#include <doctest.h>

#include "nbundle/lindblad.hpp"
#include "nbundle/observables.hpp"

using namespace nbundle;

namespace {

SystemConfig small_cfg() {
    SystemConfig cfg;
    cfg.lambda = 0.765367;
    cfg.kappa = 0.02;
    cfg.gamma = 0.005;
    cfg.trunc = FockTruncation(6);
    cfg.bundle_N = 2;
    return cfg;
}

Op random_density(int d, unsigned seed) {
    std::srand(seed);
    Op a = Op::Random(d, d);
    Op rho = Op(a * a.adjoint());
    rho /= rho.trace();
    return rho;
}

}  // namespace

TEST_CASE("dissipator worked example: L[b] on |1><1|") {
    FockTruncation tr(3);
    const Op b = annihilation_op(tr);
    Op rho = Op::Zero(4, 4);
    rho(1, 1) = 1.0;
    const Op out = dissipator(rho, b);
    // L[b]|1><1| = |0><0| - |1><1|
    CHECK(out(0, 0).real() == doctest::Approx(1.0));
    CHECK(out(1, 1).real() == doctest::Approx(-1.0));
    CHECK(std::abs(out.trace()) < 1e-14);
}

TEST_CASE("dressed lowering operator structure") {
    auto cfg = small_cfg();
    const Op o = dressed_lowering_op(cfg);
    const int P = cfg.trunc.photon_dim();
    // <g,0|O|g,1> = 1 and <e,0|O|e,0> = lambda
    CHECK(o(composite_index(0, 0, cfg.trunc), composite_index(0, 1, cfg.trunc)).real() ==
          doctest::Approx(1.0));
    CHECK(o(composite_index(1, 0, cfg.trunc), composite_index(1, 0, cfg.trunc)).real() ==
          doctest::Approx(cfg.lambda));
    // no qubit-block mixing
    CHECK(o.topRightCorner(P, P).cwiseAbs().maxCoeff() == 0.0);
    CHECK(o.bottomLeftCorner(P, P).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("master RHS is trace-free and Hermiticity-preserving") {
    auto cfg = small_cfg();
    const auto diss = zero_temp_dissipators(cfg);
    const Op rho = random_density(cfg.trunc.dim(), 42);
    const Op out = me_rhs(321.5, rho, cfg, diss);
    CHECK(std::abs(out.trace()) < 1e-13);
    CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("structured RHS equals the dense reference") {
    auto cfg = small_cfg();
    const auto diss = zero_temp_dissipators(cfg);
    MasterRhs fast(cfg, diss);
    for (unsigned seed : {1u, 7u}) {
        const Op rho = random_density(cfg.trunc.dim(), seed);
        Op out(rho.rows(), rho.cols());
        for (double t : {0.0, 850.0, 1234.5}) {
            fast(t, rho, out);
            const Op ref = me_rhs(t, rho, cfg, diss);
            CHECK((out - ref).cwiseAbs().maxCoeff() < 1e-13);
        }
    }
}

TEST_CASE("structured RHS projects out non-Hermitian round-off components") {
    // Skew components fed through the Hermitian-input shortcut would obey an
    // anticommutator equation with growing modes; the RHS must map the input
    // through its Hermitian part so such components never get amplified.
    auto cfg = small_cfg();
    const auto diss = zero_temp_dissipators(cfg);
    MasterRhs fast(cfg, diss);
    const Op rho = random_density(cfg.trunc.dim(), 5);
    Op skew = Op::Random(rho.rows(), rho.cols());
    skew = 1e-6 * (skew - skew.adjoint().eval());
    Op out_perturbed(rho.rows(), rho.cols()), out_clean(rho.rows(), rho.cols());
    fast(850.0, Op(rho + skew), out_perturbed);
    fast(850.0, rho, out_clean);
    CHECK((out_perturbed - out_clean).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("generic RHS path equals the dense reference for thermal baths") {
    auto cfg = small_cfg();
    cfg.omega0 = 5.0;
    const auto diss = thermal_dissipators(cfg, 0.5, 0.5);
    MasterRhs fast(cfg, diss);
    const Op rho = random_density(cfg.trunc.dim(), 3);
    Op out(rho.rows(), rho.cols());
    fast(777.0, rho, out);
    const Op ref = me_rhs(777.0, rho, cfg, diss);
    CHECK((out - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("thermal dissipators approach the zero-temperature set as T -> 0") {
    auto cfg = small_cfg();
    cfg.omega0 = 5.0;
    const auto cold = thermal_dissipators(cfg, 0.01, 0.01);
    const auto zt = zero_temp_dissipators(cfg);
    // upward rates vanish, downward rates approach kappa and gamma
    CHECK(cold.channels[0].rate == doctest::Approx(cfg.kappa).epsilon(1e-10));
    CHECK(cold.channels[1].rate < 1e-40);
    CHECK(cold.channels[3].rate == doctest::Approx(cfg.gamma).epsilon(1e-10));
    CHECK(cold.channels[4].rate < 1e-40);
    CHECK((cold.channels[0].c - zt.channels[0].c).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(thermal_dissipators(cfg, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("vacuum is stationary without drive") {
    auto cfg = small_cfg();
    cfg.pulses.omega_0_amp = 0.0;
    const auto diss = zero_temp_dissipators(cfg);
    Op rho = Op::Zero(cfg.trunc.dim(), cfg.trunc.dim());
    rho(0, 0) = 1.0;
    CHECK(me_rhs(12.0, rho, cfg, diss).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("photon number decays as e^{-kappa t} at lambda = 0") {
    SystemConfig cfg;
    cfg.lambda = 0.0;
    cfg.kappa = 0.05;
    cfg.gamma = 0.0;
    cfg.pulses.omega_0_amp = 0.0;
    cfg.trunc = FockTruncation(4);
    const auto diss = zero_temp_dissipators(cfg);
    DensityState rho0{Op::Zero(cfg.trunc.dim(), cfg.trunc.dim()), 0.0};
    rho0.rho(composite_index(0, 1, cfg.trunc), composite_index(0, 1, cfg.trunc)) = 1.0;
    IntegratorSettings s;
    s.rel_tol = 1e-10;
    s.abs_tol = 1e-13;
    const auto grid = linspace_grid(0.0, 5.0 / cfg.kappa, 5.0);
    const auto states = evolve_master(rho0, grid, cfg, diss, s);
    for (const auto& st : states) {
        const double n = photon_moment(st.rho, cfg.trunc, 1);
        const double expect = std::exp(-cfg.kappa * st.time);
        CHECK(std::abs(n - expect) <= 1e-6 * expect + 1e-12);
    }
}

TEST_CASE("evolution preserves density-state invariants under drive") {
    auto cfg = small_cfg();
    cfg.kappa = 0.001;
    cfg.gamma = 0.002;
    const auto diss = zero_temp_dissipators(cfg);
    DensityState rho0{Op::Zero(cfg.trunc.dim(), cfg.trunc.dim()), 0.0};
    rho0.rho(0, 0) = 1.0;
    IntegratorSettings s;
    const auto states = evolve_master(rho0, linspace_grid(0.0, 400.0, 100.0), cfg, diss, s);
    for (const auto& st : states) CHECK(check_density_state(st.rho).ok);
    // drive has begun moving population by t = 400
    CHECK(states.back().rho(0, 0).real() < 1.0);
}

TEST_CASE("closed undriven system conserves energy") {
    auto cfg = small_cfg();
    cfg.kappa = 0.0;
    cfg.gamma = 0.0;
    cfg.pulses.omega_0_amp = 0.0;
    const auto diss = zero_temp_dissipators(cfg);
    const Op h0 = h0_operator(cfg);
    // superposition with coherence between |g,1> and |e,0>
    StateVec psi = basis_state(0, 1, cfg.trunc) + basis_state(1, 0, cfg.trunc);
    psi.normalize();
    DensityState rho0{Op(psi * psi.adjoint()), 0.0};
    IntegratorSettings s;
    s.rel_tol = 1e-10;
    const auto states = evolve_master(rho0, linspace_grid(0.0, 60.0, 20.0), cfg, diss, s);
    const double e0 = real_expectation(h0, states.front().rho);
    for (const auto& st : states)
        CHECK(real_expectation(h0, st.rho) == doctest::Approx(e0).epsilon(1e-8));
}

TEST_CASE("self-convergence under tolerance refinement") {
    auto cfg = small_cfg();
    cfg.kappa = 0.001;
    const auto diss = zero_temp_dissipators(cfg);
    DensityState rho0{Op::Zero(cfg.trunc.dim(), cfg.trunc.dim()), 0.0};
    rho0.rho(0, 0) = 1.0;
    auto run_at = [&](double rtol) {
        IntegratorSettings s;
        s.rel_tol = rtol;
        s.abs_tol = rtol * 1e-2;
        return evolve_master(rho0, {0.0, 700.0}, cfg, diss, s).back().rho;
    };
    const Op coarse = run_at(1e-6);
    const Op fine = run_at(1e-10);
    CHECK((coarse - fine).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("invariant violation is reported with diagnostics") {
    auto cfg = small_cfg();
    const auto diss = zero_temp_dissipators(cfg);
    DensityState bad{Op::Zero(cfg.trunc.dim(), cfg.trunc.dim()), 0.0};
    bad.rho(0, 0) = 1.5;  // trace 1.5
    IntegratorSettings s;
    CHECK_THROWS_WITH_AS(
        (void)evolve_master(bad, {0.0, 1.0}, cfg, diss, s),
        doctest::Contains("invariant violated"), std::runtime_error);
}
