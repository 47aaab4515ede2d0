#pragma once

// Dirac potentials, Schur coefficient sequences, and the bijection between
// the Dirac system y_{k+1} = (I + i z j C_k) y_k and the Szego recurrence
// X_{k+1} = C~_k diag(lambda I, I) X_k.

#include "dirac/core.hpp"
#include "dirac/jalgebra.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace dirac {

/// Finite sequence C_0 ... C_r of positive j-unitary m x m matrices.
template <class Real = double>
struct DiracPotential {
    Signature sig;
    std::vector<Matrix<Real>> C;

    std::size_t size() const noexcept { return C.size(); }
    /// Index r of the last matrix.
    std::size_t last() const noexcept { return C.size() - 1; }

    void validate(double tol = Tolerances{}.membership) const {
        sig.validate();
        if (C.empty()) throw ValidationError("potential: empty sequence");
        for (std::size_t k = 0; k < C.size(); ++k) {
            require_j_unitary_positive(C[k], sig, tol, "potential C_" + std::to_string(k));
        }
    }

    /// The potential restricted to 0 <= k <= r.
    DiracPotential truncated(std::size_t r) const {
        if (r >= C.size()) throw ValidationError("potential: truncation index out of range");
        return {sig, std::vector<Matrix<Real>>(C.begin(), C.begin() + static_cast<std::ptrdiff_t>(r + 1))};
    }

    template <class To>
    DiracPotential<To> cast() const {
        DiracPotential<To> out{sig, {}};
        for (const auto& c : C) out.C.push_back(cast_matrix<To>(c));
        return out;
    }
};

/// Finite sequence of strictly contractive m1 x m2 Schur coefficients.
template <class Real = double>
struct SchurSequence {
    Signature sig;
    std::vector<Matrix<Real>> rho;

    std::size_t size() const noexcept { return rho.size(); }

    void validate(const Tolerances& tol = {}) const {
        sig.validate();
        if (rho.empty()) throw ValidationError("schur sequence: empty sequence");
        for (std::size_t k = 0; k < rho.size(); ++k) {
            require_shape(rho[k], sig.m1, sig.m2, "schur coefficient");
            if (!(spectral_norm(rho[k]) < 1.0 - tol.contraction_margin)) {
                throw ValidationError("schur coefficient " + std::to_string(k) + " is not strictly contractive");
            }
        }
    }

    template <class To>
    SchurSequence<To> cast() const {
        SchurSequence<To> out{sig, {}};
        for (const auto& r : rho) out.rho.push_back(cast_matrix<To>(r));
        return out;
    }
};

/// U_0 = I, U_{k+1} = U_k (i C~_k j). Each U_k is j-unitary.
template <class Real = double>
struct UChain {
    std::vector<Matrix<Real>> U;
};

template <class Real>
struct SzegoImage {
    DiracPotential<Real> potential;
    UChain<Real> chain;
};

/// Maps Schur coefficients to the Dirac potential C_k = j U_{k+1} U_{k+1}* j,
/// with U accumulated left to right from the Halmos extensions of rho_k.
template <class Real>
SzegoImage<Real> schur_to_dirac(const SchurSequence<Real>& s, const Tolerances& tol = {}) {
    s.validate(tol);
    const Matrix<Real> j = signature_matrix<Real>(s.sig);
    const Complex<Real> iu = imag_unit<Real>();
    SzegoImage<Real> out{{s.sig, {}}, {{eye<Real>(s.sig.m())}}};
    for (const auto& rho : s.rho) {
        const Matrix<Real> ct = halmos_extension(rho, tol);
        const Matrix<Real> next = out.chain.U.back() * (iu * ct * j);
        out.potential.C.push_back(hermitian_part(Matrix<Real>(j * next * next.adjoint() * j)));
        out.chain.U.push_back(next);
    }
    return out;
}

/// Inverse of schur_to_dirac: C~_k = (j U_k* C_k U_k j)^{1/2},
/// rho_k from the block partition of C~_k, then U_{k+1} = U_k (i C~_k j).
template <class Real>
SchurSequence<Real> dirac_to_schur(const DiracPotential<Real>& p, const Tolerances& tol = {}) {
    p.validate(tol.membership);
    const Matrix<Real> j = signature_matrix<Real>(p.sig);
    const Complex<Real> iu = imag_unit<Real>();
    SchurSequence<Real> out{p.sig, {}};
    Matrix<Real> u = eye<Real>(p.sig.m());
    for (std::size_t k = 0; k < p.size(); ++k) {
        const Matrix<Real> sq = hermitian_part(Matrix<Real>(j * u.adjoint() * p.C[k] * u * j));
        if (min_hermitian_eigenvalue(sq) <= 0.0) {
            throw NumericalError("dirac_to_schur: j U* C U j is not positive at k = " + std::to_string(k));
        }
        const Matrix<Real> ct = hermitian_power(sq, Real(0.5));
        out.rho.push_back(halmos_decompose(ct, p.sig, tol));
        u = u * (iu * ct * j);
    }
    return out;
}

/// Seeded complex Gaussian coefficients, each rescaled onto the ball of
/// spectral radius max_norm when it falls outside.
inline SchurSequence<double> random_schur(std::uint64_t seed, std::size_t r, const Signature& sig,
                                          double max_norm = 0.8) {
    sig.validate();
    if (!(max_norm > 0.0 && max_norm < 1.0)) {
        throw ValidationError("random_schur: max_norm must lie in (0, 1)");
    }
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    SchurSequence<double> out{sig, {}};
    for (std::size_t k = 0; k <= r; ++k) {
        Mat rho(idx(sig.m1), idx(sig.m2));
        for (Eigen::Index a = 0; a < rho.rows(); ++a) {
            for (Eigen::Index b = 0; b < rho.cols(); ++b) {
                const double re = normal(gen);
                const double im = normal(gen);
                rho(a, b) = cplx(re, im);
            }
        }
        const double norm = spectral_norm(rho);
        if (norm > max_norm) rho *= max_norm / norm;
        out.rho.push_back(rho);
    }
    return out;
}

/// One Szego step X_{k+1} = C~_k diag(lambda I_{m1}, I_{m2}) X_k.
template <class Real>
Matrix<Real> szego_step(const Matrix<Real>& rho, const Matrix<Real>& x, const Complex<Real>& lambda) {
    const auto m1 = rho.rows();
    if (x.rows() != rho.rows() + rho.cols()) throw ValidationError("szego_step: dimension mismatch");
    Matrix<Real> scaled = x;
    scaled.topRows(m1) *= lambda;
    return halmos_extension(rho) * scaled;
}

/// One Dirac step y_{k+1} = (I + i z j C_k) y_k.
template <class Real>
Matrix<Real> dirac_step(const Matrix<Real>& c, const Matrix<Real>& y, const Complex<Real>& z, const Signature& sig) {
    require_shape(c, sig.m(), sig.m(), "dirac_step");
    if (y.rows() != c.rows()) throw ValidationError("dirac_step: dimension mismatch");
    const Matrix<Real> j = signature_matrix<Real>(sig);
    return y + (imag_unit<Real>() * z) * (j * (c * y));
}

/// Solution X_0 ... X_{r+1} of the Szego recurrence at a fixed lambda.
template <class Real>
std::vector<Matrix<Real>> szego_solution(const SchurSequence<Real>& s, const Matrix<Real>& x0,
                                         const Complex<Real>& lambda) {
    std::vector<Matrix<Real>> xs{x0};
    for (const auto& rho : s.rho) xs.push_back(szego_step(rho, xs.back(), lambda));
    return xs;
}

/// Transforms a Szego solution X_k, evaluated at lambda = (z - i)/(z + i), into
/// the Dirac solution y_k(z) = (i + z)^k U_k (I + i z j) X_k.
template <class Real>
std::vector<Matrix<Real>> transform_solution(const UChain<Real>& chain, const std::vector<Matrix<Real>>& xs,
                                             const Complex<Real>& z, const Signature& sig) {
    const Complex<Real> iu = imag_unit<Real>();
    if (abs_d(Complex<Real>(z + iu)) == 0.0) throw ValidationError("transform_solution: z = -i");
    if (xs.size() > chain.U.size()) throw ValidationError("transform_solution: chain shorter than solution");
    const Matrix<Real> j = signature_matrix<Real>(sig);
    const Matrix<Real> front = eye<Real>(sig.m()) + (iu * z) * j;
    std::vector<Matrix<Real>> ys;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        ys.push_back(ipow(Complex<Real>(iu + z), k) * (chain.U[k] * front * xs[k]));
    }
    return ys;
}

/// lambda = (z - i)/(z + i), the spectral variable of the Szego side.
template <class Real>
Complex<Real> szego_lambda(const Complex<Real>& z) {
    const Complex<Real> iu = imag_unit<Real>();
    return (z - iu) / (z + iu);
}

}  // namespace dirac
