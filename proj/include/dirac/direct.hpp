#pragma once

// Fundamental solutions W_k(z), Weyl functions on an interval as Mobius
// transforms of W_{r+1}(z)^{-1}, Weyl-disk diagnostics, and the summation
// identity for W_k* C_k W_k.

#include "dirac/core.hpp"
#include "dirac/jalgebra.hpp"
#include "dirac/potential.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

namespace dirac {

/// W_{r+1}(z) = (I + i z j C_r) ... (I + i z j C_0).
template <class Real = double>
struct FundamentalValue {
    std::size_t r = 0;
    Complex<Real> z;
    Matrix<Real> W;
};

namespace detail {

template <class Real>
bool near(const Complex<Real>& a, const Complex<Real>& b) {
    return abs_d(Complex<Real>(a - b)) < 1e3 * static_cast<double>(std::numeric_limits<Real>::epsilon());
}

/// N D^{-1} with a conditioning check on D.
template <class Real>
Matrix<Real> right_divide(const Matrix<Real>& num, const Matrix<Real>& den, const char* what) {
    Eigen::PartialPivLU<Matrix<Real>> lu(den.adjoint());
    const double rcond = to_double(lu.rcond());
    if (!(rcond > 1e2 * to_double(std::numeric_limits<Real>::epsilon()))) {
        throw NumericalError(std::string(what) + ": singular denominator block");
    }
    return Matrix<Real>(lu.solve(Matrix<Real>(num.adjoint()))).adjoint();
}

}  // namespace detail

/// W_0(z) ... W_{r+1}(z) for the first r+1 matrices of the potential.
template <class Real>
std::vector<Matrix<Real>> fundamental_sequence(const DiracPotential<Real>& p, const Complex<Real>& z,
                                               std::size_t r) {
    if (r >= p.size()) throw ValidationError("fundamental_sequence: r exceeds potential length");
    std::vector<Matrix<Real>> ws{eye<Real>(p.sig.m())};
    for (std::size_t k = 0; k <= r; ++k) ws.push_back(dirac_step(p.C[k], ws.back(), z, p.sig));
    return ws;
}

template <class Real>
FundamentalValue<Real> fundamental_solution(const DiracPotential<Real>& p, const Complex<Real>& z) {
    Matrix<Real> w = eye<Real>(p.sig.m());
    for (const auto& c : p.C) w = dirac_step(c, w, z, p.sig);
    return {p.last(), z, w};
}

/// W_{r+1}(z)^{-1} = (1 + z^2)^{-r-1} j W_{r+1}(conj z)* j, from the value at conj z.
template <class Real>
Matrix<Real> inverse_from_conjugate(const FundamentalValue<Real>& at_conj, const Signature& sig) {
    const Complex<Real> z = std::conj(at_conj.z);
    const Complex<Real> f = ipow(Complex<Real>(Real(1) + z * z), at_conj.r + 1);
    if (abs_d(f) == 0.0) throw ValidationError("inverse_from_conjugate: z = +-i");
    const Matrix<Real> j = signature_matrix<Real>(sig);
    return (j * at_conj.W.adjoint() * j) / f;
}

template <class Real>
Matrix<Real> canonical_parameter(const Signature& sig) {
    Matrix<Real> p = Matrix<Real>::Zero(idx(sig.m()), idx(sig.m1));
    p.topRows(idx(sig.m1)) = eye<Real>(sig.m1);
    return p;
}

/// Margins of the two conditions P*P > 0 and P*jP >= 0 (minimum eigenvalues).
struct PropertyJ {
    double nondegeneracy = 0.0;
    double j_nonnegativity = 0.0;

    bool ok(double tol = 1e-12) const { return nondegeneracy > 0.0 && j_nonnegativity >= -tol; }
};

template <class Real>
PropertyJ property_j(const Matrix<Real>& param, const Signature& sig) {
    require_shape(param, sig.m(), sig.m1, "Weyl parameter");
    const Matrix<Real> j = signature_matrix<Real>(sig);
    const double scale = std::max(1e-300, fro(Matrix<Real>(param.adjoint() * param)));
    return {min_hermitian_eigenvalue(Matrix<Real>(param.adjoint() * param)),
            min_hermitian_eigenvalue(Matrix<Real>(param.adjoint() * j * param)) / scale};
}

/// phi = [0 I] W^{-1} P ([I 0] W^{-1} P)^{-1}, with W = W_{r+1}(z) inverted through
/// its value at conj z. Undefined at z = +-i.
template <class Real>
Matrix<Real> weyl_mobius(const DiracPotential<Real>& p, const Complex<Real>& z, const Matrix<Real>& param) {
    const Complex<Real> iu = imag_unit<Real>();
    if (detail::near(z, iu) || detail::near(z, Complex<Real>(-iu))) {
        throw ValidationError("weyl_mobius: z = +-i is excluded");
    }
    require_shape(param, p.sig.m(), p.sig.m1, "Weyl parameter");
    const Matrix<Real> winv = inverse_from_conjugate(fundamental_solution(p, Complex<Real>(std::conj(z))), p.sig);
    const Matrix<Real> t = winv * param;
    return detail::right_divide(Matrix<Real>(t.bottomRows(idx(p.sig.m2))), Matrix<Real>(t.topRows(idx(p.sig.m1))),
                                "weyl_mobius");
}

/// phi = -[0 I] W(conj z)* P ([I 0] W(conj z)* P)^{-1}. Agrees with weyl_mobius
/// for the parameter jP and stays defined at z = i.
template <class Real>
Matrix<Real> weyl_mobius_interval(const FundamentalValue<Real>& at_conj, const Matrix<Real>& param,
                                  const Signature& sig) {
    require_shape(param, sig.m(), sig.m1, "Weyl parameter");
    const Matrix<Real> t = at_conj.W.adjoint() * param;
    return -detail::right_divide(Matrix<Real>(t.bottomRows(idx(sig.m2))), Matrix<Real>(t.topRows(idx(sig.m1))),
                                 "weyl_mobius_interval");
}

template <class Real>
Matrix<Real> weyl_mobius_interval(const DiracPotential<Real>& p, const Complex<Real>& z, const Matrix<Real>& param) {
    return weyl_mobius_interval(fundamental_solution(p, Complex<Real>(std::conj(z))), param, p.sig);
}

/// Weyl-disk diagnostics for a candidate phi at level r.
struct DiskReport {
    /// min eigenvalue of [I phi*] W* j W [I; phi], divided by ||W||^2 ||[I; phi]||^2
    double membership_margin = 0.0;
    /// min eigenvalue of c (I - phi* phi) - sum_k q^k [I phi*] W_k* C_k W_k [I; phi],
    /// divided by the norm of the partial sum, with c = (1 + |z|^2) / (2 Im z)
    double sum_bound_margin = 0.0;

    bool member(double tol = 1e-9) const { return membership_margin >= -tol; }
    bool bounded(double tol = 1e-9) const { return sum_bound_margin >= -tol; }
};

template <class Real>
DiskReport weyl_disk_membership(const DiracPotential<Real>& p, const Matrix<Real>& phi, std::size_t r,
                                const Complex<Real>& z) {
    require_shape(phi, p.sig.m2, p.sig.m1, "Weyl function value");
    if (!(z.imag() > Real(0))) throw ValidationError("weyl_disk_membership: z must lie in the upper half-plane");
    const auto ws = fundamental_sequence(p, z, r);
    const Matrix<Real> j = signature_matrix<Real>(p.sig);
    Matrix<Real> col(idx(p.sig.m()), idx(p.sig.m1));
    col.topRows(idx(p.sig.m1)) = eye<Real>(p.sig.m1);
    col.bottomRows(idx(p.sig.m2)) = phi;

    DiskReport out;
    const Matrix<Real>& w = ws.back();
    const Matrix<Real> form = col.adjoint() * w.adjoint() * j * w * col;
    const double wn = fro(w) * fro(col);
    out.membership_margin = min_hermitian_eigenvalue(form) / std::max(1e-300, wn * wn);

    const Real q = Real(1) / (Real(1) + std::norm(z));
    Matrix<Real> partial = Matrix<Real>::Zero(idx(p.sig.m1), idx(p.sig.m1));
    Real qk(1);
    for (std::size_t k = 0; k <= r; ++k) {
        partial += qk * (col.adjoint() * ws[k].adjoint() * p.C[k] * ws[k] * col);
        qk *= q;
    }
    const Real c = (Real(1) + std::norm(z)) / (Real(2) * z.imag());
    const Matrix<Real> bound = c * (eye<Real>(p.sig.m1) - phi.adjoint() * phi);
    out.sum_bound_margin = min_hermitian_eigenvalue(Matrix<Real>(bound - partial)) / std::max(1.0, fro(partial));
    return out;
}

/// Relative residual of
///   sum_{k<=r} q^k W_k* C_k W_k = (1 + |z|^2) / (i (conj z - z)) (j - q^{r+1} W_{r+1}* j W_{r+1}),
/// with q = 1 / (1 + |z|^2).
template <class Real>
double summation_identity_check(const DiracPotential<Real>& p, const Complex<Real>& z, std::size_t r) {
    if (z.imag() == Real(0)) throw ValidationError("summation_identity_check: z must not be real");
    const auto ws = fundamental_sequence(p, z, r);
    const Matrix<Real> j = signature_matrix<Real>(p.sig);
    const Real q = Real(1) / (Real(1) + std::norm(z));
    Matrix<Real> lhs = Matrix<Real>::Zero(idx(p.sig.m()), idx(p.sig.m()));
    Real qk(1);
    for (std::size_t k = 0; k <= r; ++k) {
        lhs += qk * (ws[k].adjoint() * p.C[k] * ws[k]);
        qk *= q;
    }
    const Matrix<Real> tail = qk * (ws[r + 1].adjoint() * j * ws[r + 1]);
    const Complex<Real> c = (Real(1) + std::norm(z)) / (imag_unit<Real>() * (std::conj(z) - z));
    const Matrix<Real> rhs = c * (j - tail);
    const double scale = std::max({fro(lhs), abs_d(c) * fro(tail), abs_d(c)});
    return fro(Matrix<Real>(lhs - rhs)) / scale;
}

/// Residual of W_{r+1}(conj z)* j W_{r+1}(z) = (1 + z^2)^{r+1} j, relative to
/// max(|W(conj z)| |W(z)|, (1 + |z|^2)^{r+1}).
template <class Real>
double j_form_identity_check(const DiracPotential<Real>& p, const Complex<Real>& z) {
    const auto w = fundamental_solution(p, z);
    const auto wc = fundamental_solution(p, Complex<Real>(std::conj(z)));
    const Matrix<Real> j = signature_matrix<Real>(p.sig);
    const Complex<Real> f = ipow(Complex<Real>(Real(1) + z * z), p.size());
    const Matrix<Real> diff = wc.W.adjoint() * j * w.W - f * j;
    const Real floor = ipow(Complex<Real>(Real(1) + std::norm(z)), p.size()).real();
    const Real scale = std::max(Real(wc.W.norm() * w.W.norm()), floor);
    return static_cast<double>(Real(diff.norm()) / scale);
}

/// min eigenvalue of (W^{-1})* j W^{-1} - (1 - 2 Im z + |z|^2)^{-r-1} j, relative to
/// the norm of the first term. Non-negative for z in the upper half-plane.
template <class Real>
double inverse_j_form_margin(const DiracPotential<Real>& p, const Complex<Real>& z) {
    const Matrix<Real> winv = inverse_from_conjugate(fundamental_solution(p, Complex<Real>(std::conj(z))), p.sig);
    const Matrix<Real> j = signature_matrix<Real>(p.sig);
    Real base = Real(1) - Real(2) * z.imag() + std::norm(z);
    Real f(1);
    for (std::size_t k = 0; k < p.size(); ++k) f /= base;
    const Matrix<Real> form = winv.adjoint() * j * winv;
    return min_hermitian_eigenvalue(Matrix<Real>(form - f * j)) / std::max(fro(form), 1e-300);
}

/// Finite-interval approximation of the semiaxis Weyl function: weyl_mobius at the
/// full length with the canonical parameter [I; 0]. Its first size() disk-variable
/// Taylor coefficients coincide with those of the semiaxis Weyl function.
template <class Real>
Matrix<Real> semiaxis_weyl_approx(const DiracPotential<Real>& p, const Complex<Real>& z) {
    if (!(z.imag() > Real(0))) throw ValidationError("semiaxis_weyl_approx: z must lie in the upper half-plane");
    return weyl_mobius(p, z, canonical_parameter<Real>(p.sig));
}

template <class Real>
Matrix<Real> semiaxis_weyl_approx(const DiracPotential<Real>& p, const Complex<Real>& z, const Matrix<Real>& param) {
    if (!(z.imag() > Real(0))) throw ValidationError("semiaxis_weyl_approx: z must lie in the upper half-plane");
    return weyl_mobius(p, z, param);
}

}  // namespace dirac
