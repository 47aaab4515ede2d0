#pragma once

// Symmetric S-node (A_r, S_r, Pi_r) of a Dirac potential:
//   A_r S_r - S_r A_r* = i Pi_r j Pi_r*,   S_r = E_r^{-1} (E_r*)^{-1},   Pi_r = E_r^{-1} Gamma_r,
// where E_r is the block lower triangular similarity K_r = E_r A_r E_r^{-1}.
// The transfer matrix w_A(r, lambda) = I - i j Pi* S^{-1} (A - lambda I)^{-1} Pi
// reproduces the fundamental solution: W_{r+1}(z) = (1 + i z)^{r+1} w_A(r, 1/(2z)).

#include "dirac/core.hpp"
#include "dirac/jalgebra.hpp"
#include "dirac/potential.hpp"

#include <string>
#include <vector>

namespace dirac {

/// Block lower triangular Toeplitz matrix with scalar multiples of the identity
/// as blocks: `diag` on the diagonal, `sub` everywhere below it.
/// A_r - lambda I has this form with diag = -i/2 - lambda and sub = -i.
template <class Real>
struct LowerToeplitz {
    std::size_t blocks = 0;
    std::size_t block = 1;
    Complex<Real> diag;
    Complex<Real> sub;

    std::size_t dim() const noexcept { return blocks * block; }

    Matrix<Real> dense() const {
        Matrix<Real> t = Matrix<Real>::Zero(idx(dim()), idx(dim()));
        for (std::size_t k = 0; k < blocks; ++k) {
            for (std::size_t p = 0; p <= k; ++p) {
                t.block(idx(k * block), idx(p * block), idx(block), idx(block)) =
                    (k == p ? diag : sub) * eye<Real>(block);
            }
        }
        return t;
    }

    /// T^{-1} M by block forward substitution.
    Matrix<Real> solve_left(const Matrix<Real>& m) const {
        if (m.rows() != idx(dim())) throw ValidationError("LowerToeplitz::solve_left: dimension mismatch");
        if (abs_d(diag) == 0.0) throw NumericalError("LowerToeplitz: singular diagonal");
        const auto b = idx(block);
        Matrix<Real> y(m.rows(), m.cols());
        Matrix<Real> acc = Matrix<Real>::Zero(b, m.cols());
        for (std::size_t k = 0; k < blocks; ++k) {
            const auto row = idx(k * block);
            y.middleRows(row, b) = (m.middleRows(row, b) - sub * acc) / diag;
            acc += y.middleRows(row, b);
        }
        return y;
    }

    /// M T^{-1} by block back substitution over columns.
    Matrix<Real> solve_right(const Matrix<Real>& m) const {
        if (m.cols() != idx(dim())) throw ValidationError("LowerToeplitz::solve_right: dimension mismatch");
        if (abs_d(diag) == 0.0) throw NumericalError("LowerToeplitz: singular diagonal");
        const auto b = idx(block);
        Matrix<Real> y(m.rows(), m.cols());
        Matrix<Real> acc = Matrix<Real>::Zero(m.rows(), b);
        for (std::size_t n = blocks; n-- > 0;) {
            const auto col = idx(n * block);
            y.middleCols(col, b) = (m.middleCols(col, b) - sub * acc) / diag;
            acc += y.middleCols(col, b);
        }
        return y;
    }
};

/// A_r - lambda I in structured form.
template <class Real>
LowerToeplitz<Real> shifted_A(std::size_t r, std::size_t m2, const Complex<Real>& lambda) {
    const Complex<Real> iu = imag_unit<Real>();
    return {r + 1, m2, Complex<Real>(-iu / Real(2) - lambda), Complex<Real>(-iu)};
}

/// Block (k, p) of A_r is -(i/2) I for p = k, -i I for p < k and 0 for p > k.
template <class Real = double>
Matrix<Real> build_A(std::size_t r, std::size_t m2) {
    return shifted_A<Real>(r, m2, Complex<Real>(0)).dense();
}

/// gamma(k) = [0 I] C_k^{1/2} for each level, split as [gamma_1(k) gamma_2(k)].
template <class Real = double>
struct GammaStack {
    Signature sig;
    std::vector<Matrix<Real>> gamma;

    std::size_t last() const noexcept { return gamma.size() - 1; }
    Matrix<Real> g1(std::size_t k) const { return gamma[k].leftCols(idx(sig.m1)); }
    Matrix<Real> g2(std::size_t k) const { return gamma[k].rightCols(idx(sig.m2)); }

    /// Gamma_r: the m2 (r+1) x m stack of gamma(0) ... gamma(r).
    Matrix<Real> stacked() const {
        const auto m2 = idx(sig.m2);
        Matrix<Real> g(m2 * idx(gamma.size()), idx(sig.m()));
        for (std::size_t k = 0; k < gamma.size(); ++k) g.middleRows(idx(k) * m2, m2) = gamma[k];
        return g;
    }
};

template <class Real>
GammaStack<Real> gamma_stack(const DiracPotential<Real>& p) {
    GammaStack<Real> out{p.sig, {}};
    for (const auto& c : p.C) out.gamma.push_back(beta_gamma(c, p.sig).gamma);
    if (min_hermitian_eigenvalue(Matrix<Real>(out.g2(0).adjoint() * out.g2(0))) <= 0.0) {
        throw NumericalError("gamma_stack: gamma_2(0) is singular");
    }
    return out;
}

/// Row block k of K_r is i gamma(k) j [gamma(0)* ... gamma(k-1)*  gamma(k)*/2  0 ... 0].
template <class Real>
Matrix<Real> build_K(const GammaStack<Real>& g) {
    const Matrix<Real> j = signature_matrix<Real>(g.sig);
    const Complex<Real> iu = imag_unit<Real>();
    const auto m2 = idx(g.sig.m2);
    const auto n = m2 * idx(g.gamma.size());
    Matrix<Real> k_mat = Matrix<Real>::Zero(n, n);
    for (std::size_t k = 0; k < g.gamma.size(); ++k) {
        const Matrix<Real> left = iu * (g.gamma[k] * j);
        for (std::size_t p = 0; p <= k; ++p) {
            Matrix<Real> blk = left * g.gamma[p].adjoint();
            if (p == k) blk /= Real(2);
            k_mat.block(idx(k) * m2, idx(p) * m2, m2, m2) = blk;
        }
    }
    return k_mat;
}

/// Similarity E_r with K_r = E_r A_r E_r^{-1} and E_r^{-1} Gamma_{r,2} = identity stack.
/// Block lower triangular; its leading sections are E_0 ... E_{r-1}.
template <class Real = double>
struct Similarity {
    std::size_t block = 1;
    Matrix<Real> E;
    std::vector<Matrix<Real>> e_minus;  // diagonal blocks e_k^-

    Matrix<Real> section(std::size_t k) const {
        const auto n = idx((k + 1) * block);
        return E.topLeftCorner(n, n);
    }
};

/// Recursion:
///   E_0 = e_0 = gamma_2(0),  e_r = -gamma(r) j gamma(r-1)* e_{r-1},
///   X_1 = gamma_2(1) - e_1,
///   X~_r = i (gamma(r) j [gamma(0)* ... gamma(r-1)*] E_{r-1} + e_r [I ... I])|_{first r-1 blocks}
///          (A_{r-2} - (i/2) I)^{-1},
///   x_r = gamma_2(r) - e_r - X~_r [I; ...; I],
/// with E_r = [[E_{r-1}, 0], [x_r X~_r, e_r]].
template <class Real>
Similarity<Real> build_E(const GammaStack<Real>& g) {
    const Matrix<Real> j = signature_matrix<Real>(g.sig);
    const Complex<Real> iu = imag_unit<Real>();
    const std::size_t bs = g.sig.m2;
    const auto m2 = idx(bs);
    const std::size_t levels = g.gamma.size();
    Similarity<Real> out{bs, Matrix<Real>::Zero(m2 * idx(levels), m2 * idx(levels)), {}};
    out.e_minus.push_back(g.g2(0));
    out.E.topLeftCorner(m2, m2) = g.g2(0);
    const Matrix<Real> gam = g.stacked();

    for (std::size_t r = 1; r < levels; ++r) {
        const Matrix<Real> cross = g.gamma[r] * j * g.gamma[r - 1].adjoint();
        Eigen::PartialPivLU<Matrix<Real>> lu(cross);
        if (!(to_double(lu.rcond()) > 1e2 * to_double(std::numeric_limits<Real>::epsilon()))) {
            throw NumericalError("build_E: gamma(r) j gamma(r-1)* is singular at r = " + std::to_string(r));
        }
        const Matrix<Real> er = -cross * out.e_minus.back();
        out.e_minus.push_back(er);
        const auto row = idx(r) * m2;
        out.E.block(row, row, m2, m2) = er;
        if (r == 1) {
            out.E.block(row, 0, m2, m2) = g.g2(1) - er;
            continue;
        }
        const auto prev = idx(r) * m2;
        Matrix<Real> l = iu * (g.gamma[r] * j * gam.topRows(prev).adjoint() * out.E.topLeftCorner(prev, prev));
        for (std::size_t p = 0; p < r; ++p) l.middleCols(idx(p) * m2, m2) += iu * er;
        const LowerToeplitz<Real> b{r - 1, bs, Complex<Real>(-iu), Complex<Real>(-iu)};
        const Matrix<Real> xt = b.solve_right(Matrix<Real>(l.leftCols(idx(r - 1) * m2)));
        Matrix<Real> xr = g.g2(r) - er;
        for (std::size_t p = 0; p + 1 < r; ++p) xr -= xt.middleCols(idx(p) * m2, m2);
        out.E.block(row, 0, m2, m2) = xr;
        out.E.block(row, m2, m2, idx(r - 1) * m2) = xt;
    }
    return out;
}

/// E^{-1} M for block lower triangular E, by block forward substitution.
template <class Real>
Matrix<Real> block_lower_solve(const Matrix<Real>& e, std::size_t block, const Matrix<Real>& m) {
    const auto b = idx(block);
    const auto blocks = e.rows() / b;
    Matrix<Real> y(m.rows(), m.cols());
    for (Eigen::Index k = 0; k < blocks; ++k) {
        Matrix<Real> rhs = m.middleRows(k * b, b);
        if (k > 0) rhs -= e.block(k * b, 0, b, k * b) * y.topRows(k * b);
        y.middleRows(k * b, b) = e.block(k * b, k * b, b, b).partialPivLu().solve(rhs);
    }
    return y;
}

template <class Real = double>
struct SNode {
    Signature sig;
    std::size_t r = 0;
    Matrix<Real> A;
    Matrix<Real> S;
    Matrix<Real> Pi;  // [Phi_{r,1} Phi_{r,2}]
    Matrix<Real> K;
    Matrix<Real> Gamma;
    Similarity<Real> E;

    std::size_t dim() const noexcept { return (r + 1) * sig.m2; }
    Matrix<Real> phi1() const { return Pi.leftCols(idx(sig.m1)); }
    Matrix<Real> phi2() const { return Pi.rightCols(idx(sig.m2)); }
    /// S^{-1} = E* E.
    Matrix<Real> S_inverse() const { return E.E.adjoint() * E.E; }
};

template <class Real>
SNode<Real> build_snode(const DiracPotential<Real>& p) {
    p.validate();
    const GammaStack<Real> g = gamma_stack(p);
    SNode<Real> node;
    node.sig = p.sig;
    node.r = p.last();
    node.A = build_A<Real>(node.r, p.sig.m2);
    node.Gamma = g.stacked();
    node.K = build_K(g);
    node.E = build_E(g);
    const Matrix<Real> einv = block_lower_solve(node.E.E, p.sig.m2, eye<Real>(node.dim()));
    node.S = hermitian_part(Matrix<Real>(einv * einv.adjoint()));
    node.Pi = block_lower_solve(node.E.E, p.sig.m2, node.Gamma);
    return node;
}

/// Relative residual of A S - S A* = i Pi j Pi*.
template <class Real>
double operator_identity_residual(const Matrix<Real>& a, const Matrix<Real>& s, const Matrix<Real>& pi,
                                  const Signature& sig) {
    const Matrix<Real> j = signature_matrix<Real>(sig);
    const Matrix<Real> rhs = imag_unit<Real>() * (pi * j * pi.adjoint());
    const Matrix<Real> lhs = a * s - s * a.adjoint();
    return fro(Matrix<Real>(lhs - rhs)) / std::max({fro(rhs), fro(s), 1e-300});
}

template <class Real>
double operator_identity_residual(const SNode<Real>& n) {
    return operator_identity_residual(n.A, n.S, n.Pi, n.sig);
}

/// Relative residual of K = E A E^{-1}.
template <class Real>
double similarity_residual(const SNode<Real>& n) {
    const Matrix<Real> einv = block_lower_solve(n.E.E, n.sig.m2, eye<Real>(n.dim()));
    const Matrix<Real> rhs = n.E.E * n.A * einv;
    return fro(Matrix<Real>(n.K - rhs)) / std::max(fro(n.K), 1e-300);
}

/// Relative residual of K - K* = i Gamma j Gamma*.
template <class Real>
double k_identity_residual(const Matrix<Real>& k, const Matrix<Real>& gamma, const Signature& sig) {
    const Matrix<Real> j = signature_matrix<Real>(sig);
    const Matrix<Real> rhs = imag_unit<Real>() * (gamma * j * gamma.adjoint());
    return fro(Matrix<Real>(k - k.adjoint() - rhs)) / std::max(fro(rhs), 1e-300);
}

/// w_A(r, lambda) = I - i j Pi* S^{-1} (A - lambda I)^{-1} Pi.
template <class Real>
Matrix<Real> transfer_matrix(const SNode<Real>& n, const Complex<Real>& lambda) {
    const Complex<Real> iu = imag_unit<Real>();
    if (abs_d(Complex<Real>(lambda + iu / Real(2))) < 1e-300) {
        throw ValidationError("transfer_matrix: lambda = -i/2 is the spectrum of A");
    }
    const Matrix<Real> j = signature_matrix<Real>(n.sig);
    const Matrix<Real> res = shifted_A(n.r, n.sig.m2, lambda).solve_left(n.Pi);
    const Matrix<Real> e_res = n.E.E * res;
    const Matrix<Real> e_pi = n.E.E * n.Pi;
    return eye<Real>(n.sig.m()) - iu * (j * (e_pi.adjoint() * e_res));
}

/// Single-level factor I + (2i / (2 lambda + i)) j gamma* gamma, so that
/// w_A(r, lambda) = factor(gamma(r)) w_A(r-1, lambda).
template <class Real>
Matrix<Real> transfer_step_factor(const Matrix<Real>& gamma, const Complex<Real>& lambda, const Signature& sig) {
    const Complex<Real> iu = imag_unit<Real>();
    const Matrix<Real> j = signature_matrix<Real>(sig);
    const Complex<Real> f = (Real(2) * iu) / (Real(2) * lambda + iu);
    return eye<Real>(sig.m()) + f * (j * gamma.adjoint() * gamma);
}

/// Relative residual of
///   w_A(lambda)* j w_A(mu) = j - i (mu - conj lambda) Pi* (A* - conj lambda I)^{-1} S^{-1} (A - mu I)^{-1} Pi.
template <class Real>
double transfer_j_form_residual(const SNode<Real>& n, const Complex<Real>& lambda, const Complex<Real>& mu) {
    const Complex<Real> iu = imag_unit<Real>();
    const Matrix<Real> j = signature_matrix<Real>(n.sig);
    const Matrix<Real> wl = transfer_matrix(n, lambda);
    const Matrix<Real> wm = transfer_matrix(n, mu);
    const Matrix<Real> rl = n.E.E * shifted_A(n.r, n.sig.m2, lambda).solve_left(n.Pi);
    const Matrix<Real> rm = n.E.E * shifted_A(n.r, n.sig.m2, mu).solve_left(n.Pi);
    const Matrix<Real> lhs = wl.adjoint() * j * wm;
    const Matrix<Real> rhs = j - (iu * (mu - std::conj(lambda))) * (rl.adjoint() * rm);
    return fro(Matrix<Real>(lhs - rhs)) / std::max({fro(lhs), fro(rhs), 1.0});
}

/// Phi_{r,2}* (A_r - (1/(2z)) I)^{-1} = -(2z / (1 + iz)) [q^r, q^{r-1}, ..., I],
/// q = (1 - iz) / (1 + iz). Returns the m2 x m2 (r+1) row.
template <class Real>
Matrix<Real> resolvent_row(std::size_t r, std::size_t m2, const Complex<Real>& z) {
    const Complex<Real> iu = imag_unit<Real>();
    if (abs_d(z) == 0.0) throw ValidationError("resolvent_row: z = 0");
    const Complex<Real> den = Real(1) + iu * z;
    if (abs_d(den) < 1e-300) throw ValidationError("resolvent_row: singular resolvent at z = i");
    const Complex<Real> q = (Real(1) - iu * z) / den;
    const Complex<Real> f = -(Real(2) * z) / den;
    Matrix<Real> row = Matrix<Real>::Zero(idx(m2), idx((r + 1) * m2));
    Complex<Real> qp(Real(1), Real(0));
    for (std::size_t k = r + 1; k-- > 0;) {
        row.middleCols(idx(k * m2), idx(m2)) = (f * qp) * eye<Real>(m2);
        qp *= q;
    }
    return row;
}

/// Phi_{r,2}* (A_r - (1/(2z)) I)^{-1} Phi_{r,2} = i (1 - q^{r+1}) I, q = (1 - iz)/(1 + iz).
template <class Real>
Matrix<Real> resolvent_contraction(std::size_t r, std::size_t m2, const Complex<Real>& z) {
    const Complex<Real> iu = imag_unit<Real>();
    const Complex<Real> q = (Real(1) - iu * z) / (Real(1) + iu * z);
    return (iu * (Real(1) - ipow(q, r + 1))) * eye<Real>(m2);
}

/// ||W_{r+1}(z) - (1 + iz)^{r+1} w_A(r, 1/(2z))|| / ||W_{r+1}(z)||.
template <class Real>
double check_fundamental_representation(const DiracPotential<Real>& p, const Complex<Real>& z) {
    const Complex<Real> iu = imag_unit<Real>();
    if (abs_d(z) == 0.0) throw ValidationError("check_fundamental_representation: z = 0");
    const SNode<Real> n = build_snode(p);
    Matrix<Real> w = eye<Real>(p.sig.m());
    for (const auto& c : p.C) w = dirac_step(c, w, z, p.sig);
    const Matrix<Real> rep = ipow(Complex<Real>(Real(1) + iu * z), p.size()) *
                             transfer_matrix(n, Complex<Real>(Real(1) / (Real(2) * z)));
    return fro(Matrix<Real>(w - rep)) / std::max(fro(w), 1e-300);
}

}  // namespace dirac
