#include <doctest.h>

#include "nbundle/integrate.hpp"

using namespace nbundle;
using Vec = Eigen::VectorXcd;
using complexd = std::complex<double>;

TEST_CASE("exponential decay against the closed form") {
    IntegratorSettings s;
    s.rel_tol = 1e-10;
    s.abs_tol = 1e-12;
    Vec y(1);
    y(0) = 1.0;
    double t = 0.0;
    rk45_integrate([](double, const Vec& v, Vec& dv) { dv = -0.3 * v; }, y, t, 5.0, s);
    CHECK(t == doctest::Approx(5.0));
    CHECK(std::abs(y(0) - std::exp(-1.5)) < 1e-9);
}

TEST_CASE("oscillator phase accuracy over many periods") {
    IntegratorSettings s;
    s.rel_tol = 1e-10;
    s.abs_tol = 1e-12;
    s.max_step = 1e3;
    Vec y(1);
    y(0) = 1.0;
    double t = 0.0;
    const double w = 2.6;
    rk45_integrate([w](double, const Vec& v, Vec& dv) { dv = complexd(0, -w) * v; }, y,
                   t, 100.0, s);
    CHECK(std::abs(y(0) - std::exp(complexd(0, -w * 100.0))) < 1e-6);
    CHECK(std::abs(std::abs(y(0)) - 1.0) < 1e-8);
}

TEST_CASE("grid emission lands exactly on requested times") {
    IntegratorSettings s;
    Rk45Stepper<Vec> st([](double, const Vec& v, Vec& dv) { dv = -v; },
                        Vec::Ones(1), 0.0, s);
    for (double tg : {0.1, 0.7, 1.0, 2.5}) {
        st.advance_to(tg);
        CHECK(st.time() == tg);  // exact clamp, not approximate
        CHECK(std::abs(st.state()(0) - std::exp(-tg)) < 1e-7);
    }
}

TEST_CASE("step size persists between advance_to calls") {
    int evals = 0;
    IntegratorSettings s;
    s.initial_step = 1e-6;
    Rk45Stepper<Vec> st(
        [&evals](double, const Vec& v, Vec& dv) {
            ++evals;
            dv = -0.01 * v;
        },
        Vec::Ones(1), 0.0, s);
    st.advance_to(1.0);
    const int first = evals;
    evals = 0;
    for (int k = 2; k <= 20; ++k) st.advance_to(k * 1.0);
    // later unit intervals reuse the grown step: far fewer evaluations each
    CHECK(evals < first * 19);
    CHECK(std::abs(st.state()(0) - std::exp(-0.2)) < 1e-7);
}

TEST_CASE("time-dependent right-hand side sampled at stage times") {
    // y' = cos(t) -> y = sin(t)
    IntegratorSettings s;
    s.rel_tol = 1e-11;
    s.abs_tol = 1e-13;
    Vec y = Vec::Zero(1);
    double t = 0.0;
    rk45_integrate([](double tt, const Vec&, Vec& dv) { dv(0) = std::cos(tt); }, y, t,
                   3.0, s);
    CHECK(std::abs(y(0) - std::sin(3.0)) < 1e-9);
}

TEST_CASE("matrix-valued state") {
    IntegratorSettings s;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(3, 3);
    double t = 0.0;
    rk45_integrate(
        [](double, const Eigen::MatrixXcd& x, Eigen::MatrixXcd& dx) { dx = -x; }, m, t,
        1.0, s);
    CHECK(std::abs(m(0, 0) - std::exp(-1.0)) < 1e-7);
    CHECK(std::abs(m(0, 1)) < 1e-12);
}

TEST_CASE("reset_state discards stale derivative information") {
    IntegratorSettings s;
    Rk45Stepper<Vec> st([](double, const Vec& v, Vec& dv) { dv = -v; },
                        Vec::Ones(1), 0.0, s);
    st.advance_to(1.0);
    Vec y2 = 2.0 * Vec::Ones(1);
    st.reset_state(y2, 1.0);
    st.advance_to(2.0);
    CHECK(std::abs(st.state()(0) - 2.0 * std::exp(-1.0)) < 1e-7);
}

TEST_CASE("tolerance controls error") {
    auto run_with = [](double rtol) {
        IntegratorSettings s;
        s.rel_tol = rtol;
        s.abs_tol = rtol * 1e-2;
        s.max_step = 1e3;
        Vec y(1);
        y(0) = 1.0;
        double t = 0.0;
        rk45_integrate([](double, const Vec& v, Vec& dv) { dv = complexd(0, -1.0) * v; },
                       y, t, 50.0, s);
        return std::abs(y(0) - std::exp(complexd(0, -50.0)));
    };
    CHECK(run_with(1e-10) < run_with(1e-5));
    CHECK(run_with(1e-10) < 1e-7);
}
