#pragma once

#include "dirac.hpp"
#include "dirac/quad.hpp"

#include <gtest/gtest.h>

#include <random>

namespace dirac::testing {

using Reals = ::testing::Types<double, quad>;

/// Unit-scaled tolerances: double gets its own, quad a much tighter one.
template <class Real>
constexpr double precise(double for_double, double for_quad = 1e-24) {
    return std::is_same_v<Real, double> ? for_double : for_quad;
}

/// Largest r where double-precision pipelines stay inside the tolerances of
/// the tests at Schur norm 0.8 (at r = 4 the worst of 100 seeds reaches
/// 5e-10 on the bijection and 6e-9 on the roundtrip). Longer potentials run in quad.
template <class Real>
constexpr std::size_t max_r() {
    return std::is_same_v<Real, double> ? 4 : 15;
}

template <class Real>
Complex<Real> c(double re, double im = 0.0) {
    return {Real(re), Real(im)};
}

template <class Real = double>
Matrix<Real> random_matrix(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix<Real> m(idx(rows), idx(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            const double re = n(gen);
            const double im = n(gen);
            m(i, k) = c<Real>(re, im);
        }
    }
    return m;
}

/// Strict contraction with spectral norm exactly `norm`.
template <class Real = double>
Matrix<Real> random_contraction(std::mt19937_64& gen, std::size_t rows, std::size_t cols, double norm) {
    Matrix<Real> m = random_matrix<Real>(gen, rows, cols);
    return m * Real(norm / spectral_norm(m));
}

/// Constant parameter [I; X] M with ||X|| < 1 and M invertible: P*P > 0 and P*jP > 0.
template <class Real = double>
Matrix<Real> random_property_j(std::mt19937_64& gen, const Signature& sig) {
    std::uniform_real_distribution<double> u(0.05, 0.95);
    Matrix<Real> p(idx(sig.m()), idx(sig.m1));
    p.topRows(idx(sig.m1)) = eye<Real>(sig.m1);
    p.bottomRows(idx(sig.m2)) = random_contraction<Real>(gen, sig.m2, sig.m1, u(gen));
    const Matrix<Real> m = eye<Real>(sig.m1) + Real(0.3) * random_matrix<Real>(gen, sig.m1, sig.m1);
    return p * m;
}

template <class Real = double>
DiracPotential<Real> random_potential(std::uint64_t seed, std::size_t r, const Signature& sig, double max_norm = 0.8) {
    return schur_to_dirac(random_schur(seed, r, sig, max_norm).cast<Real>()).potential;
}

template <class Real = double>
DiracPotential<Real> trivial_potential(std::size_t r, const Signature& sig) {
    return {sig, std::vector<Matrix<Real>>(r + 1, eye<Real>(sig.m()))};
}

template <class Real>
double max_diff(const Matrix<Real>& a, const Matrix<Real>& b) {
    return max_abs(Matrix<Real>(a - b));
}

template <class Real>
double rel_diff(const Matrix<Real>& a, const Matrix<Real>& b) {
    return fro(Matrix<Real>(a - b)) / std::max(fro(b), 1e-300);
}

/// Identity stack [I; ...; I] with r+1 blocks.
template <class Real>
Matrix<Real> identity_stack(std::size_t r, std::size_t m2) {
    Matrix<Real> s(idx((r + 1) * m2), idx(m2));
    for (std::size_t k = 0; k <= r; ++k) s.middleRows(idx(k * m2), idx(m2)) = eye<Real>(m2);
    return s;
}

inline const std::vector<Signature>& signatures() {
    static const std::vector<Signature> s{{1, 1}, {2, 1}, {1, 2}, {2, 2}, {3, 1}};
    return s;
}

}  // namespace dirac::testing
