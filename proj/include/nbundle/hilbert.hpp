// Operators and states on the truncated qubit (x) Fock composite space.
//
// Basis convention (qubit-major): |g,0>, |g,1>, ..., |g,n_max>, |e,0>, ..., |e,n_max>.
// All composite index arithmetic goes through composite_index().

#pragma once

#include <complex>
#include <stdexcept>
#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace nbundle {

using complexd = std::complex<double>;
using Op = Eigen::MatrixXcd;
using StateVec = Eigen::VectorXcd;

inline constexpr double kNormEps = 1e-10;

struct FockTruncation {
    int n_max = 12;

    FockTruncation() = default;
    explicit FockTruncation(int nmax) : n_max(nmax) {
        if (n_max < 1) throw std::invalid_argument("FockTruncation: n_max must be >= 1");
    }
    int photon_dim() const { return n_max + 1; }
    int dim() const { return 2 * (n_max + 1); }
};

// qubit = 0 for |g>, 1 for |e>
inline int composite_index(int qubit, int n, const FockTruncation& trunc) {
    return qubit * trunc.photon_dim() + n;
}

struct DensityState {
    Op rho;
    double time = 0.0;

    int dim() const { return static_cast<int>(rho.rows()); }
};

struct PureState {
    StateVec psi;
    double time = 0.0;

    int dim() const { return static_cast<int>(psi.size()); }
};

// Photon-factor annihilation operator, <n-1|b|n> = sqrt(n).
inline Op annihilation_op(const FockTruncation& trunc) {
    const int p = trunc.photon_dim();
    Op b = Op::Zero(p, p);
    for (int n = 1; n < p; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
    return b;
}

inline Op number_op(const FockTruncation& trunc) {
    const int p = trunc.photon_dim();
    Op nop = Op::Zero(p, p);
    for (int n = 0; n < p; ++n) nop(n, n) = n;
    return nop;
}

struct QubitOps {
    Op sigma_plus;   // |e><g|
    Op sigma_minus;  // |g><e|
    Op sigma_ee;     // |e><e|
};

// 2x2 qubit operators in the {|g>, |e>} ordering.
inline QubitOps qubit_ops() {
    QubitOps q;
    q.sigma_plus = Op::Zero(2, 2);
    q.sigma_plus(1, 0) = 1.0;
    q.sigma_minus = Op::Zero(2, 2);
    q.sigma_minus(0, 1) = 1.0;
    q.sigma_ee = Op::Zero(2, 2);
    q.sigma_ee(1, 1) = 1.0;
    return q;
}

// Kronecker product, qubit factor first.
inline Op tensor(const Op& a, const Op& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols())
        throw std::invalid_argument("tensor: operators must be square");
    const long ra = a.rows(), rb = b.rows();
    if (ra * rb > (1l << 20)) throw std::overflow_error("tensor: dimension overflow");
    Op out(ra * rb, ra * rb);
    for (long i = 0; i < ra; ++i)
        for (long j = 0; j < ra; ++j)
            out.block(i * rb, j * rb, rb, rb) = a(i, j) * b;
    return out;
}

// exp[beta (b^dag - b)] on the photon factor; unitary up to truncation error.
inline Op displacement_op(double beta, const FockTruncation& trunc) {
    if (!std::isfinite(beta)) throw std::invalid_argument("displacement_op: beta must be finite");
    const Op b = annihilation_op(trunc);
    Op gen = beta * (b.adjoint() - b);
    return gen.exp();
}

// exp[alpha b^dag - conj(alpha) b] for complex alpha (phase-space displacement).
inline Op displacement_op(complexd alpha, const FockTruncation& trunc) {
    const Op b = annihilation_op(trunc);
    Op gen = alpha * b.adjoint() - std::conj(alpha) * b;
    return gen.exp();
}

inline complexd expectation(const Op& obs, const Op& rho) {
    if (obs.rows() != rho.rows())
        throw std::invalid_argument("expectation: dimension mismatch");
    return (obs * rho).trace();
}

inline complexd expectation(const Op& obs, const StateVec& psi) {
    if (obs.rows() != psi.size())
        throw std::invalid_argument("expectation: dimension mismatch");
    return psi.dot(obs * psi);
}

// Hermitian observable on a density matrix / pure state; checks that the
// imaginary part is negligible before discarding it.
inline double real_expectation(const Op& obs, const Op& rho) {
    const complexd v = expectation(obs, rho);
    if (std::abs(v.imag()) > 1e-8 * std::max(1.0, std::abs(v.real())))
        throw std::runtime_error("real_expectation: non-negligible imaginary part");
    return v.real();
}

inline double real_expectation(const Op& obs, const StateVec& psi) {
    const complexd v = expectation(obs, psi);
    if (std::abs(v.imag()) > 1e-8 * std::max(1.0, std::abs(v.real())))
        throw std::runtime_error("real_expectation: non-negligible imaginary part");
    return v.real();
}

struct StateCheck {
    double herm_violation = 0.0;
    double trace_drift = 0.0;
    double min_eigenvalue = 0.0;
    bool ok = false;
};

// DensityState invariants: Hermitian within 1e-10, trace within 1e-8 of 1,
// minimum eigenvalue >= -1e-8.
inline StateCheck check_density_state(const Op& rho,
                                      double herm_tol = 1e-10,
                                      double trace_tol = 1e-8,
                                      double eig_floor = -1e-8) {
    StateCheck c;
    c.herm_violation = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    c.trace_drift = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
    Eigen::SelfAdjointEigenSolver<Op> es(0.5 * (rho + rho.adjoint()),
                                         Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    c.ok = c.herm_violation <= herm_tol && c.trace_drift <= trace_tol &&
           c.min_eigenvalue >= eig_floor;
    return c;
}

inline StateVec basis_state(int qubit, int n, const FockTruncation& trunc) {
    StateVec v = StateVec::Zero(trunc.dim());
    v(composite_index(qubit, n, trunc)) = 1.0;
    return v;
}

}  // namespace nbundle
