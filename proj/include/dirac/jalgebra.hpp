#pragma once

// Linear algebra in the indefinite metric j = diag(I_{m1}, -I_{m2}).

#include "dirac/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

namespace dirac {

template <class Real = double>
Matrix<Real> signature_matrix(const Signature& sig) {
    sig.validate();
    Matrix<Real> j = Matrix<Real>::Zero(idx(sig.m()), idx(sig.m()));
    for (std::size_t i = 0; i < sig.m(); ++i) {
        j(idx(i), idx(i)) = Real(i < sig.m1 ? 1 : -1);
    }
    return j;
}

/// Residuals of the conditions defining a positive j-unitary matrix.
struct ClassResiduals {
    double hermitian = 0.0;  // ||C - C*|| / ||C||
    double j_unitary = 0.0;  // ||C j C - j|| / ||C||^2
    double min_eigenvalue = 0.0;

    bool ok(double tol) const { return hermitian <= tol && j_unitary <= tol && min_eigenvalue > 0.0; }
};

template <class Real>
ClassResiduals class_residuals(const Matrix<Real>& c, const Signature& sig) {
    require_shape(c, sig.m(), sig.m(), "positive j-unitary matrix");
    const Matrix<Real> j = signature_matrix<Real>(sig);
    const double scale = std::max(1.0, fro(c));
    ClassResiduals out;
    out.hermitian = fro(Matrix<Real>(c - c.adjoint())) / scale;
    out.j_unitary = fro(Matrix<Real>(c * j * c - j)) / (scale * scale);
    out.min_eigenvalue = min_hermitian_eigenvalue(c);
    return out;
}

template <class Real>
bool is_j_unitary_positive(const Matrix<Real>& c, const Signature& sig, double tol = Tolerances{}.membership) {
    return class_residuals(c, sig).ok(tol);
}

template <class Real>
void require_j_unitary_positive(const Matrix<Real>& c, const Signature& sig, double tol, const std::string& what) {
    const auto res = class_residuals(c, sig);
    if (!res.ok(tol)) {
        throw ValidationError(what + ": not positive j-unitary (hermitian residual " +
                              std::to_string(res.hermitian) + ", j residual " + std::to_string(res.j_unitary) +
                              ", min eigenvalue " + std::to_string(res.min_eigenvalue) + ")");
    }
}

/// Real power of a Hermitian positive-definite matrix through its unitary
/// eigendecomposition C = u* D u, returning u* D^s u. The input is
/// symmetrized first. Powers of a positive j-unitary matrix stay positive
/// j-unitary.
template <class Real>
Matrix<Real> hermitian_power(const Matrix<Real>& c, const Real& s, double tol = Tolerances{}.membership) {
    using std::pow;
    if (c.rows() != c.cols()) throw ValidationError("hermitian_power: matrix is not square");
    const double scale = std::max(1.0, max_abs(c));
    if (max_abs(Matrix<Real>(c - c.adjoint())) > tol * scale) {
        throw ValidationError("hermitian_power: matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix<Real>> es(hermitian_part(c));
    if (es.info() != Eigen::Success) throw NumericalError("hermitian_power: eigendecomposition failed");
    const auto& d = es.eigenvalues();
    if (!(d(0) > Real(0))) {
        throw ValidationError("hermitian_power: non-positive eigenvalue " + std::to_string(to_double(d(0))));
    }
    Matrix<Real> ds = Matrix<Real>::Zero(d.size(), d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) ds(i, i) = Complex<Real>(pow(d(i), s), Real(0));
    const Matrix<Real>& u = es.eigenvectors();
    return hermitian_part(Matrix<Real>(u * ds * u.adjoint()));
}

template <class Real>
Matrix<Real> hermitian_power(const Matrix<Real>& c, double s, double tol = Tolerances{}.membership)
    requires(!std::is_same_v<Real, double>)
{
    return hermitian_power(c, Real(s), tol);
}

/// Positive j-unitary matrix D H built from a strict contraction rho (m1 x m2):
///   H = [[I, rho], [rho*, I]],  D = diag((I - rho rho*)^{-1/2}, (I - rho* rho)^{-1/2}).
/// D and H commute, so the product is Hermitian.
template <class Real>
Matrix<Real> halmos_extension(const Matrix<Real>& rho, const Tolerances& tol = {}) {
    const auto m1 = static_cast<std::size_t>(rho.rows());
    const auto m2 = static_cast<std::size_t>(rho.cols());
    if (m1 == 0 || m2 == 0) throw ValidationError("halmos_extension: empty coefficient");
    const double norm = spectral_norm(rho);
    if (!(norm < 1.0 - tol.contraction_margin)) {
        throw ValidationError("halmos_extension: coefficient is not strictly contractive (norm " +
                              std::to_string(norm) + ")");
    }
    const auto a = idx(m1);
    const auto b = idx(m2);
    Matrix<Real> d = Matrix<Real>::Zero(a + b, a + b);
    d.topLeftCorner(a, a) = hermitian_power(Matrix<Real>(eye<Real>(m1) - rho * rho.adjoint()), Real(-0.5));
    d.bottomRightCorner(b, b) = hermitian_power(Matrix<Real>(eye<Real>(m2) - rho.adjoint() * rho), Real(-0.5));
    Matrix<Real> h = eye<Real>(m1 + m2);
    h.topRightCorner(a, b) = rho;
    h.bottomLeftCorner(b, a) = rho.adjoint();
    return hermitian_part(Matrix<Real>(d * h));
}

/// Inverse of halmos_extension on positive j-unitary matrices:
/// rho = c11^{-1} c12, where c11 = (I - rho rho*)^{-1/2} and c12 = c11 rho.
template <class Real>
Matrix<Real> halmos_decompose(const Matrix<Real>& c, const Signature& sig, const Tolerances& tol = {}) {
    require_j_unitary_positive(c, sig, tol.membership, "halmos_decompose");
    const auto a = idx(sig.m1);
    const auto b = idx(sig.m2);
    const Matrix<Real> c11 = hermitian_part(Matrix<Real>(c.topLeftCorner(a, a)));
    Matrix<Real> rho = c11.llt().solve(Matrix<Real>(c.topRightCorner(a, b)));
    const Matrix<Real> back = halmos_extension(rho, tol);
    const double scale = std::max(1.0, fro(c));
    if (fro(Matrix<Real>(back - c)) > 1e3 * tol.membership * scale * scale) {
        throw NumericalError("halmos_decompose: reconstruction residual too large");
    }
    return rho;
}

template <class Real>
struct BetaGamma {
    Matrix<Real> beta;   // m1 x m
    Matrix<Real> gamma;  // m2 x m
};

/// beta = [I 0] C^{1/2} and gamma = [0 I] C^{1/2}, so that
/// C = 2 beta* beta - j with beta j beta* = I, and C = j + 2 gamma* gamma
/// with gamma j gamma* = -I.
template <class Real>
BetaGamma<Real> beta_gamma(const Matrix<Real>& c, const Signature& sig) {
    require_shape(c, sig.m(), sig.m(), "beta_gamma");
    const Matrix<Real> root = hermitian_power(c, Real(0.5));
    return {root.topRows(idx(sig.m1)), root.bottomRows(idx(sig.m2))};
}

}  // namespace dirac
