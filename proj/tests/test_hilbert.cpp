#include <doctest.h>

#include "nbundle/hilbert.hpp"

using namespace nbundle;

TEST_CASE("annihilation operator matrix elements") {
    FockTruncation tr(4);
    const Op b = annihilation_op(tr);
    CHECK(b(0, 1).real() == doctest::Approx(1.0));
    CHECK(b(1, 2).real() == doctest::Approx(std::sqrt(2.0)));
    CHECK(b(2, 3).real() == doctest::Approx(std::sqrt(3.0)));
    CHECK(b(3, 4).real() == doctest::Approx(2.0));
    CHECK(b(4, 4) == complexd(0, 0));
    // b^dag b is the number operator
    const Op n = Op(b.adjoint() * b);
    CHECK((n - number_op(tr)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("commutator [b, b^dag] = 1 away from the truncation edge") {
    FockTruncation tr(10);
    const Op b = annihilation_op(tr);
    const Op comm = Op(b * b.adjoint() - b.adjoint() * b);
    for (int n = 0; n < tr.photon_dim() - 1; ++n)
        CHECK(comm(n, n).real() == doctest::Approx(1.0).epsilon(1e-12));
    // edge row carries the truncation artifact
    CHECK(comm(tr.n_max, tr.n_max).real() == doctest::Approx(-tr.n_max));
}

TEST_CASE("qubit operators") {
    const auto q = qubit_ops();
    CHECK(q.sigma_plus(1, 0) == complexd(1, 0));
    CHECK(q.sigma_minus(0, 1) == complexd(1, 0));
    CHECK((Op(q.sigma_plus * q.sigma_minus) - q.sigma_ee).cwiseAbs().maxCoeff() ==
          doctest::Approx(0.0));
}

TEST_CASE("tensor product ordering is qubit-major") {
    FockTruncation tr(2);
    const auto q = qubit_ops();
    const Op sp = tensor(q.sigma_plus, Op::Identity(3, 3));
    // |g,1> -> |e,1>: column composite(0,1), row composite(1,1)
    CHECK(sp(composite_index(1, 1, tr), composite_index(0, 1, tr)) == complexd(1, 0));
    CHECK(sp.cwiseAbs().sum() == doctest::Approx(3.0));
}

TEST_CASE("displacement operator is unitary and inverts under beta -> -beta") {
    FockTruncation tr(30);
    const Op d = displacement_op(0.7, tr);
    const Op dm = displacement_op(-0.7, tr);
    const int keep = 12;  // sub-block untouched by truncation error
    const Op prod = Op(d * dm);
    for (int i = 0; i < keep; ++i)
        for (int j = 0; j < keep; ++j) {
            const double expect = i == j ? 1.0 : 0.0;
            CHECK(std::abs(prod(i, j) - expect) < 1e-10);
        }
    const Op uni = Op(d.adjoint() * d);
    for (int i = 0; i < keep; ++i) CHECK(std::abs(uni(i, i) - 1.0) < 1e-10);
}

TEST_CASE("complex displacement reduces to the real form") {
    FockTruncation tr(20);
    const Op a = displacement_op(complexd(0.3, 0.0), tr);
    const Op b = displacement_op(0.3, tr);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("expectation values") {
    FockTruncation tr(4);
    const StateVec psi = basis_state(0, 2, tr);
    const Op nfull = tensor(Op::Identity(2, 2), number_op(tr));
    CHECK(real_expectation(nfull, psi) == doctest::Approx(2.0));
    const Op rho = psi * psi.adjoint();
    CHECK(real_expectation(nfull, rho) == doctest::Approx(2.0));
}

TEST_CASE("density state checks") {
    FockTruncation tr(3);
    Op rho = Op::Zero(tr.dim(), tr.dim());
    rho(0, 0) = 0.5;
    rho(1, 1) = 0.5;
    CHECK(check_density_state(rho).ok);

    Op bad_trace = rho;
    bad_trace(0, 0) = 0.6;
    CHECK_FALSE(check_density_state(bad_trace).ok);

    Op bad_herm = rho;
    bad_herm(0, 1) = complexd(0, 1e-6);
    CHECK_FALSE(check_density_state(bad_herm).ok);

    Op bad_eig = rho;
    bad_eig(0, 1) = bad_eig(1, 0) = 0.9;  // off-diagonal exceeds diagonal
    const auto c = check_density_state(bad_eig);
    CHECK(c.min_eigenvalue < -1e-8);
    CHECK_FALSE(c.ok);
}

TEST_CASE("truncation convergence of displaced vacuum moments") {
    // <n> of D(beta)|0> is beta^2, independent of truncation once converged.
    const double beta = 0.765;
    double prev = -1.0;
    for (int nmax : {8, 16, 24}) {
        FockTruncation tr(nmax);
        const Op d = displacement_op(beta, tr);
        StateVec v = StateVec::Zero(tr.photon_dim());
        v(0) = 1.0;
        const StateVec psi = d * v;
        const double n = std::real(psi.dot(number_op(tr) * psi));
        if (prev >= 0) CHECK(std::abs(n - beta * beta) < std::abs(prev - beta * beta) + 1e-12);
        prev = n;
    }
    CHECK(prev == doctest::Approx(beta * beta).epsilon(1e-10));
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(FockTruncation(0), std::invalid_argument);
    FockTruncation tr(3);
    const Op rect = Op::Zero(2, 3);
    CHECK_THROWS_AS(tensor(rect, rect), std::invalid_argument);
    CHECK_THROWS_AS(expectation(Op::Identity(4, 4), basis_state(0, 0, tr)),
                    std::invalid_argument);
}
