#pragma once

// Recovery of a Dirac potential from the Taylor coefficients phi_0 ... phi_r
// of its Weyl function, through the Sylvester identity
//   A_k S_k - S_k A_k* = i Pi_k j Pi_k*,   Pi_k = [Phi_{k,1}  identity stack],
// and C_k = j + 2 gamma(k)* gamma(k) with
//   gamma(k)* gamma(k) = Pi_k* S_k^{-1} P* (P S_k^{-1} P*)^{-1} P S_k^{-1} Pi_k,
// P selecting the last block row.

#include "dirac/core.hpp"
#include "dirac/jalgebra.hpp"
#include "dirac/potential.hpp"
#include "dirac/snode.hpp"
#include "dirac/taylor.hpp"

#include <limits>
#include <string>
#include <vector>

namespace dirac {

/// Taylor data whose S_k is not positive definite.
class InadmissibleData : public NumericalError {
public:
    InadmissibleData(std::size_t level, double min_eigenvalue)
        : NumericalError("inadmissible taylor data: S_" + std::to_string(level) +
                         " is not positive definite (min eigenvalue " + std::to_string(min_eigenvalue) + ")"),
          level_(level),
          min_eigenvalue_(min_eigenvalue) {}

    std::size_t level() const noexcept { return level_; }
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    std::size_t level_;
    double min_eigenvalue_;
};

/// Phi_{k,1} = -[phi_0; phi_0 + phi_1; ...; phi_0 + ... + phi_k].
template <class Real>
Matrix<Real> phi_stack(const TaylorData<Real>& t, std::size_t k) {
    t.validate();
    if (k > t.last()) throw ValidationError("phi_stack: level exceeds data length");
    const auto m2 = idx(t.sig.m2);
    Matrix<Real> out(m2 * idx(k + 1), idx(t.sig.m1));
    Matrix<Real> partial = Matrix<Real>::Zero(m2, idx(t.sig.m1));
    for (std::size_t l = 0; l <= k; ++l) {
        partial += t.phi[l];
        out.middleRows(idx(l) * m2, m2) = -partial;
    }
    return out;
}

/// Pi_k = [Phi_{k,1}  stack of I_{m2}].
template <class Real>
Matrix<Real> pi_from_phi_stack(const Matrix<Real>& phi1, const Signature& sig) {
    const auto m2 = idx(sig.m2);
    const auto blocks = phi1.rows() / m2;
    Matrix<Real> pi(phi1.rows(), idx(sig.m()));
    pi.leftCols(idx(sig.m1)) = phi1;
    for (Eigen::Index k = 0; k < blocks; ++k) pi.block(k * m2, idx(sig.m1), m2, m2) = eye<Real>(sig.m2);
    return pi;
}

/// Unique solution of A S - S A* = i Pi j Pi* for A = A_k.
/// Blockwise: S_{kp} = -Q_{kp} - sum_{l<k} S_{lp} - sum_{l<p} S_{kl}, Q = Pi j Pi*.
template <class Real>
Matrix<Real> solve_identity(const Matrix<Real>& pi, const Signature& sig) {
    sig.validate();
    const auto m2 = idx(sig.m2);
    if (pi.cols() != idx(sig.m()) || pi.rows() == 0 || pi.rows() % m2 != 0) {
        throw ValidationError("solve_identity: Pi is not m2 (k+1) x m");
    }
    const auto blocks = pi.rows() / m2;
    const Matrix<Real> q = pi * signature_matrix<Real>(sig) * pi.adjoint();
    Matrix<Real> s(pi.rows(), pi.rows());
    Matrix<Real> col_sums = Matrix<Real>::Zero(m2, pi.rows());  // sum over rows above
    for (Eigen::Index k = 0; k < blocks; ++k) {
        Matrix<Real> row_sum = Matrix<Real>::Zero(m2, m2);
        for (Eigen::Index p = 0; p < blocks; ++p) {
            const Matrix<Real> blk = -q.block(k * m2, p * m2, m2, m2) - col_sums.middleCols(p * m2, m2) - row_sum;
            s.block(k * m2, p * m2, m2, m2) = blk;
            row_sum += blk;
        }
        col_sums += s.middleRows(k * m2, m2);
    }
    return hermitian_part(s);
}

/// S_r directly from the coefficients: S = I - T T*, T block lower Toeplitz
/// with blocks phi_{k-l}. Entrywise
///   s_00 = I - phi_0 phi_0*,  s_{0q} = -phi_0 phi_q*,  s_{q0} = -phi_q phi_0*,
///   s_{k+1,p+1} = s_{kp} - phi_{k+1} phi_{p+1}*.
template <class Real>
Matrix<Real> structured_S(const TaylorData<Real>& t) {
    t.validate();
    const auto m2 = idx(t.sig.m2);
    const auto blocks = idx(t.size());
    Matrix<Real> s(m2 * blocks, m2 * blocks);
    auto blk = [&](Eigen::Index k, Eigen::Index p) { return s.block(k * m2, p * m2, m2, m2); };
    for (Eigen::Index q = 0; q < blocks; ++q) {
        blk(0, q) = -t.phi[0] * t.phi[static_cast<std::size_t>(q)].adjoint();
        blk(q, 0) = -t.phi[static_cast<std::size_t>(q)] * t.phi[0].adjoint();
    }
    blk(0, 0) += eye<Real>(t.sig.m2);
    for (Eigen::Index k = 0; k + 1 < blocks; ++k) {
        for (Eigen::Index p = 0; p + 1 < blocks; ++p) {
            blk(k + 1, p + 1) = blk(k, p) - t.phi[static_cast<std::size_t>(k + 1)] *
                                                t.phi[static_cast<std::size_t>(p + 1)].adjoint();
        }
    }
    return s;
}

template <class Real = double>
struct RecoveryLevel {
    Matrix<Real> phi1;   // Phi_{k,1}
    Matrix<Real> S;      // S_k
    Matrix<Real> G;      // gamma(k)* gamma(k)
    Matrix<Real> C;      // C_k
    double min_eigenvalue = 0.0;     // of S_k
    double identity_residual = 0.0;  // of A_k S_k - S_k A_k* = i Pi_k j Pi_k*
};

template <class Real = double>
struct RecoveryTrace {
    std::vector<RecoveryLevel<Real>> levels;
};

template <class Real = double>
struct RecoveryResult {
    DiracPotential<Real> potential;
    RecoveryTrace<Real> trace;
};

struct RecoveryOptions {
    double class_tol = 1e-8;  // on the recovered C_k
    bool keep_matrices = true;
};

/// Level by level, failing at the first S_k that is not positive definite.
/// S_k is the leading block of S_r, so one Sylvester solve and one block
/// Cholesky factorization S_r = L L* serve every level. With Y = L^{-1} Pi_r,
/// gamma(k)* gamma(k) = Y_k* Y_k where Y_k is block row k of Y.
template <class Real>
RecoveryResult<Real> recover_potential(const TaylorData<Real>& t, const RecoveryOptions& opt = {}) {
    t.validate();
    const Signature sig = t.sig;
    const auto m2 = idx(sig.m2);
    const Matrix<Real> j = signature_matrix<Real>(sig);
    const Matrix<Real> phi1 = phi_stack(t, t.last());
    const Matrix<Real> pi = pi_from_phi_stack(phi1, sig);
    const Matrix<Real> s = solve_identity(pi, sig);

    RecoveryResult<Real> out{{sig, {}}, {}};
    Matrix<Real> l = Matrix<Real>::Zero(s.rows(), s.cols());
    Matrix<Real> y(pi.rows(), pi.cols());
    for (std::size_t k = 0; k < t.size(); ++k) {
        const auto off = idx(k) * m2;
        const auto n = off + m2;
        const Matrix<Real> sk = s.topLeftCorner(n, n);

        const double min_eig = min_hermitian_eigenvalue(sk);
        // Pivot block of the Cholesky factorization: the Schur complement of S_{k-1} in S_k.
        Matrix<Real> pivot = s.block(off, off, m2, m2);
        Matrix<Real> below;
        if (k > 0) {
            below = l.topLeftCorner(off, off).template triangularView<Eigen::Lower>().solve(
                Matrix<Real>(s.block(0, off, off, m2)));
            pivot -= below.adjoint() * below;
        }
        Eigen::LLT<Matrix<Real>> chol(hermitian_part(pivot));
        if (!(min_eig > 0.0) || chol.info() != Eigen::Success) throw InadmissibleData(k, min_eig);
        if (k > 0) l.block(off, 0, m2, off) = below.adjoint();
        l.block(off, off, m2, m2) = chol.matrixL();

        Matrix<Real> rhs = pi.middleRows(off, m2);
        if (k > 0) rhs -= l.block(off, 0, m2, off) * y.topRows(off);
        y.middleRows(off, m2) = l.block(off, off, m2, m2).template triangularView<Eigen::Lower>().solve(rhs);

        const Matrix<Real> yk = y.middleRows(off, m2);
        const Matrix<Real> g = hermitian_part(Matrix<Real>(yk.adjoint() * yk));
        const Matrix<Real> c = hermitian_part(Matrix<Real>(j + Real(2) * g));
        const auto res = class_residuals(c, sig);
        if (!res.ok(opt.class_tol)) {
            throw NumericalError("recover_potential: C_" + std::to_string(k) +
                                 " is not positive j-unitary (j residual " + std::to_string(res.j_unitary) +
                                 ", min eigenvalue " + std::to_string(res.min_eigenvalue) + ")");
        }
        out.potential.C.push_back(c);

        RecoveryLevel<Real> level;
        level.min_eigenvalue = min_eig;
        level.identity_residual = operator_identity_residual(build_A<Real>(k, sig.m2), sk,
                                                             Matrix<Real>(pi.topRows(n)), sig);
        if (opt.keep_matrices) {
            level.phi1 = phi1.topRows(n);
            level.S = sk;
            level.G = g;
            level.C = c;
        }
        out.trace.levels.push_back(std::move(level));
    }
    return out;
}

/// Largest p with phi_k^A = phi_k^B for all k <= p, or -1 when phi_0 differs.
/// Entries agree when |a - b| <= tol max(1, |a|, |b|).
template <class Real>
long borg_marchenko_compare(const TaylorData<Real>& a, const TaylorData<Real>& b, double tol = 1e-10) {
    if (!(a.sig == b.sig)) throw ValidationError("borg_marchenko_compare: signature mismatch");
    const std::size_t n = std::min(a.size(), b.size());
    long p = -1;
    for (std::size_t k = 0; k < n; ++k) {
        const double scale = std::max({1.0, max_abs(a.phi[k]), max_abs(b.phi[k])});
        if (max_abs(Matrix<Real>(a.phi[k] - b.phi[k])) > tol * scale) break;
        p = static_cast<long>(k);
    }
    return p;
}

/// Whether appending phi_next keeps the structured S positive definite.
template <class Real>
bool continuation_check(const TaylorData<Real>& t, const Matrix<Real>& phi_next) {
    t.validate();
    require_shape(phi_next, t.sig.m2, t.sig.m1, "continuation_check");
    TaylorData<Real> ext = t;
    ext.phi.push_back(phi_next);
    const Matrix<Real> s = structured_S(ext);
    Eigen::LLT<Matrix<Real>> chol(s);
    return chol.info() == Eigen::Success && min_hermitian_eigenvalue(s) > 0.0;
}

/// Largest blockwise relative deviation max_k ||A_k - B_k|| / ||B_k||.
template <class Real>
double potential_deviation(const DiracPotential<Real>& a, const DiracPotential<Real>& b) {
    if (!(a.sig == b.sig) || a.size() != b.size()) throw ValidationError("potential_deviation: shape mismatch");
    double out = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        out = std::max(out, fro(Matrix<Real>(a.C[k] - b.C[k])) / std::max(fro(b.C[k]), 1e-300));
    }
    return out;
}

}  // namespace dirac
