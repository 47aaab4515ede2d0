#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace dirac {

// All numerical code is templated on the real type `Real` (double, or the
// quad type from dirac/quad.hpp). Complex matrices are dense Eigen matrices.
template <class Real>
using Complex = std::complex<Real>;

template <class Real>
using Matrix = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using Mat = Matrix<double>;
using cplx = Complex<double>;

/// Malformed input: wrong dimensions, out-of-range parameters, or a matrix
/// that is not in the class an operation requires.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A computation that broke down on otherwise well-formed input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Block sizes of the indefinite metric j = diag(I_{m1}, -I_{m2}).
struct Signature {
    std::size_t m1 = 1;
    std::size_t m2 = 1;

    constexpr std::size_t m() const noexcept { return m1 + m2; }

    void validate() const {
        if (m1 == 0 || m2 == 0) {
            throw ValidationError("signature: m1 and m2 must both be positive");
        }
    }

    friend bool operator==(const Signature&, const Signature&) = default;
};

/// Thresholds for class-membership checks, relative to the matrix norm.
struct Tolerances {
    double membership = 1e-9;
    double contraction_margin = 1e-12;
};

inline Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

template <class Real>
constexpr Complex<Real> imag_unit() {
    return {Real(0), Real(1)};
}

template <class Real>
Matrix<Real> eye(std::size_t n) {
    return Matrix<Real>::Identity(idx(n), idx(n));
}

template <class Real>
double to_double(const Real& x) {
    return static_cast<double>(x);
}

template <class Real>
Complex<double> to_double(const Complex<Real>& z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

template <class Real>
Real pi() {
    using std::acos;
    return acos(Real(-1));
}

/// z^n for integer n >= 0 by repeated squaring.
template <class Real>
Complex<Real> ipow(Complex<Real> z, std::size_t n) {
    Complex<Real> out(Real(1), Real(0));
    while (n > 0) {
        if (n & 1U) out *= z;
        z *= z;
        n >>= 1U;
    }
    return out;
}

template <class Real>
double abs_d(const Complex<Real>& z) {
    using std::abs;
    return static_cast<double>(abs(z));
}

/// Frobenius norm as a double.
template <class Real>
double fro(const Matrix<Real>& a) {
    return a.size() == 0 ? 0.0 : static_cast<double>(a.norm());
}

template <class Real>
double max_abs(const Matrix<Real>& a) {
    double out = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) out = std::max(out, abs_d(a(i, k)));
    }
    return out;
}

template <class Real>
double spectral_norm(const Matrix<Real>& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix<Real>> svd(a);
    return static_cast<double>(svd.singularValues()(0));
}

template <class Real>
Matrix<Real> hermitian_part(const Matrix<Real>& a) {
    return (a + a.adjoint()) / Real(2);
}

/// Smallest eigenvalue of the Hermitian part of a square matrix.
template <class Real>
double min_hermitian_eigenvalue(const Matrix<Real>& a) {
    Eigen::SelfAdjointEigenSolver<Matrix<Real>> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    return static_cast<double>(es.eigenvalues()(0));
}

template <class Real>
void require_shape(const Matrix<Real>& a, std::size_t rows, std::size_t cols, const char* what) {
    if (a.rows() != idx(rows) || a.cols() != idx(cols)) {
        throw ValidationError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                              std::to_string(cols) + ", got " + std::to_string(a.rows()) + "x" +
                              std::to_string(a.cols()));
    }
}

template <class To, class From>
Matrix<To> cast_matrix(const Matrix<From>& a) {
    Matrix<To> out(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            out(i, k) = Complex<To>(To(a(i, k).real()), To(a(i, k).imag()));
        }
    }
    return out;
}

}  // namespace dirac
