#pragma once

// Identity suite run by `dirac_lab verify`: every structural identity of the
// direct problem and the S-node, evaluated on a grid of points in the upper
// half-plane.

#include "dirac/core.hpp"
#include "dirac/direct.hpp"
#include "dirac/jalgebra.hpp"
#include "dirac/potential.hpp"
#include "dirac/snode.hpp"
#include "dirac/taylor.hpp"

#include <string>
#include <vector>

namespace dirac {

struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

/// Pass when value <= threshold.
inline Check upper_check(std::string name, double value, double threshold) {
    return {std::move(name), value, threshold, value <= threshold};
}

/// Pass when value >= threshold.
inline Check lower_check(std::string name, double value, double threshold) {
    return {std::move(name), value, threshold, value >= threshold};
}

inline bool all_pass(const std::vector<Check>& checks) {
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

/// Five points in the upper half-plane away from z = i.
template <class Real = double>
std::vector<Complex<Real>> default_grid() {
    return {{Real(0.3), Real(0.4)}, {Real(1), Real(1)}, {Real(-0.7), Real(0.2)}, {Real(0), Real(1.8)},
            {Real(0), Real(2.2)}};
}

template <class Real>
void validate_grid(const std::vector<Complex<Real>>& grid) {
    if (grid.empty()) throw ValidationError("z grid is empty");
    for (const auto& z : grid) {
        if (!(z.imag() > Real(0))) throw ValidationError("z grid: points must lie in the upper half-plane");
        if (abs_d(Complex<Real>(z - imag_unit<Real>())) < 1e-12) throw ValidationError("z grid: z = i is excluded");
    }
}

struct SuiteOptions {
    double tol = 1e-9;              // relative residual threshold for identities
    double taylor_tol = 1e-6;       // numeric vs algebraic Taylor coefficients
    double contraction_slack = 1e-9;
    TaylorSampling sampling{};
    bool taylor = true;
};

template <class Real>
std::vector<Check> identity_suite(const DiracPotential<Real>& p, const std::vector<Complex<Real>>& grid,
                                  const SuiteOptions& opt = {}) {
    p.validate();
    validate_grid(grid);
    const Complex<Real> iu = imag_unit<Real>();
    const Signature sig = p.sig;
    const std::size_t r = p.last();
    const SNode<Real> n = build_snode(p);
    const Matrix<Real> param = canonical_parameter<Real>(sig);

    double jform = 0, summation = 0, inverse_margin = 1, representation = 0, step = 0, wa_jform = 0;
    double row = 0, contraction = 0, weyl_norm = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const Complex<Real>& z = grid[g];
        const Complex<Real> lambda = Real(1) / (Real(2) * z);
        jform = std::max(jform, j_form_identity_check(p, z));
        summation = std::max(summation, summation_identity_check(p, z, r));
        inverse_margin = std::min(inverse_margin, inverse_j_form_margin(p, z));

        const Matrix<Real> w = fundamental_solution(p, z).W;
        const Matrix<Real> wa = transfer_matrix(n, lambda);
        const Matrix<Real> rep = ipow(Complex<Real>(Real(1) + iu * z), r + 1) * wa;
        representation = std::max(representation, fro(Matrix<Real>(w - rep)) / std::max(fro(w), 1e-300));

        if (r > 0) {
            const SNode<Real> prev = build_snode(p.truncated(r - 1));
            const Matrix<Real> gamma = n.Gamma.bottomRows(idx(sig.m2));
            const Matrix<Real> stepped = transfer_step_factor(gamma, lambda, sig) * transfer_matrix(prev, lambda);
            step = std::max(step, fro(Matrix<Real>(wa - stepped)) / std::max(fro(wa), 1e-300));
        }

        const Complex<Real> mu = Real(1) / (Real(2) * grid[(g + 1) % grid.size()]);
        wa_jform = std::max({wa_jform, transfer_j_form_residual(n, lambda, mu), transfer_j_form_residual(n, lambda, lambda)});

        const LowerToeplitz<Real> shifted = shifted_A(r, sig.m2, lambda);
        const Matrix<Real> closed = resolvent_row(r, sig.m2, z);
        const Matrix<Real> solved = shifted.solve_right(Matrix<Real>(n.phi2().adjoint()));
        row = std::max(row, fro(Matrix<Real>(closed - solved)) / std::max(fro(closed), 1e-300));
        const Matrix<Real> c_closed = resolvent_contraction(r, sig.m2, z);
        const Matrix<Real> c_solved = n.phi2().adjoint() * shifted.solve_left(n.phi2());
        contraction = std::max(contraction, fro(Matrix<Real>(c_closed - c_solved)) / std::max(fro(c_closed), 1.0));

        weyl_norm = std::max(weyl_norm, spectral_norm(weyl_mobius(p, z, param)));
    }

    Matrix<Real> stack(idx(n.dim()), idx(sig.m2));
    for (std::size_t k = 0; k <= r; ++k) stack.middleRows(idx(k * sig.m2), idx(sig.m2)) = eye<Real>(sig.m2);

    std::vector<Check> out;
    out.push_back(upper_check("j-form of W: W(conj z)* j W(z) = (1+z^2)^{r+1} j", jform, opt.tol));
    out.push_back(lower_check("inverse j-form margin of W^{-1}", inverse_margin, -opt.tol));
    out.push_back(upper_check("summation formula", summation, opt.tol));
    out.push_back(upper_check("operator identity AS - SA* = i Pi j Pi*", operator_identity_residual(n), opt.tol));
    out.push_back(upper_check("similarity K = E A E^{-1}", similarity_residual(n), opt.tol));
    out.push_back(upper_check("K - K* = i Gamma j Gamma*", k_identity_residual(n.K, n.Gamma, sig), opt.tol));
    out.push_back(upper_check("E^{-1} Gamma_2 = identity stack", fro(Matrix<Real>(n.phi2() - stack)) / fro(stack), opt.tol));
    out.push_back(lower_check("S positive definite (min eigenvalue)", min_hermitian_eigenvalue(n.S), 0.0));
    out.push_back(upper_check("W(z) = (1+iz)^{r+1} w_A(1/(2z))", representation, opt.tol));
    if (r > 0) out.push_back(upper_check("step factor of w_A", step, opt.tol));
    out.push_back(upper_check("j-form of w_A", wa_jform, opt.tol));
    out.push_back(upper_check("closed-form resolvent row", row, opt.tol));
    out.push_back(upper_check("closed-form resolvent contraction", contraction, opt.tol));
    out.push_back(upper_check("Weyl function non-expansive (max norm)", weyl_norm, 1.0 + opt.contraction_slack));
    if (opt.taylor) {
        const double dev = max_coefficient_deviation(taylor_numeric(p, opt.sampling), taylor_algebraic(p));
        out.push_back(upper_check("Taylor coefficients: sampling vs algebraic", dev, opt.taylor_tol));
    }
    return out;
}

}  // namespace dirac
