#pragma once

// Taylor coefficients phi_0 ... phi_r at zeta = 0 of the disk-variable Weyl
// function phi(i (1 - zeta) / (1 + zeta)).

#include "dirac/core.hpp"
#include "dirac/direct.hpp"
#include "dirac/potential.hpp"
#include "dirac/snode.hpp"

#include <cmath>
#include <vector>

namespace dirac {

template <class Real = double>
struct TaylorData {
    Signature sig;
    std::vector<Matrix<Real>> phi;  // m2 x m1 each

    std::size_t size() const noexcept { return phi.size(); }
    std::size_t last() const noexcept { return phi.size() - 1; }

    void validate() const {
        sig.validate();
        if (phi.empty()) throw ValidationError("taylor data: empty sequence");
        for (const auto& f : phi) require_shape(f, sig.m2, sig.m1, "taylor coefficient");
    }

    TaylorData truncated(std::size_t r) const {
        if (r >= phi.size()) throw ValidationError("taylor data: truncation index out of range");
        return {sig, std::vector<Matrix<Real>>(phi.begin(), phi.begin() + static_cast<std::ptrdiff_t>(r + 1))};
    }

    template <class To>
    TaylorData<To> cast() const {
        TaylorData<To> out{sig, {}};
        for (const auto& f : phi) out.phi.push_back(cast_matrix<To>(f));
        return out;
    }
};

/// z = i (1 - zeta) / (1 + zeta): the unit disk onto the upper half-plane.
template <class Real>
Complex<Real> disk_to_halfplane(const Complex<Real>& zeta) {
    const Complex<Real> den = Real(1) + zeta;
    if (abs_d(den) == 0.0) throw ValidationError("disk_to_halfplane: zeta = -1");
    return imag_unit<Real>() * (Real(1) - zeta) / den;
}

/// Inverts Phi_{r,1} = -[phi_0; phi_0 + phi_1; ...]:
/// phi_0 = -Phi(0), phi_k = Phi(k-1) - Phi(k).
template <class Real>
TaylorData<Real> taylor_from_phi_stack(const Matrix<Real>& phi1, const Signature& sig) {
    sig.validate();
    const auto m2 = idx(sig.m2);
    if (phi1.cols() != idx(sig.m1) || phi1.rows() == 0 || phi1.rows() % m2 != 0) {
        throw ValidationError("taylor_from_phi_stack: stack is not m2 (r+1) x m1");
    }
    const auto blocks = phi1.rows() / m2;
    TaylorData<Real> out{sig, {}};
    out.phi.push_back(-phi1.topRows(m2));
    for (Eigen::Index k = 1; k < blocks; ++k) {
        out.phi.push_back(phi1.middleRows((k - 1) * m2, m2) - phi1.middleRows(k * m2, m2));
    }
    return out;
}

template <class Real>
TaylorData<Real> taylor_algebraic(const DiracPotential<Real>& p) {
    return taylor_from_phi_stack(build_snode(p).phi1(), p.sig);
}

struct TaylorSampling {
    double radius = 0.1;
    std::size_t samples = 64;
};

/// Values of phi at zeta_j = radius e^{2 pi i j / samples}, evaluated by the
/// interval Mobius form with a constant parameter.
template <class Real>
std::vector<Matrix<Real>> sample_disk_weyl(const DiracPotential<Real>& p, const TaylorSampling& s,
                                           const Matrix<Real>& param) {
    using std::cos;
    using std::sin;
    std::vector<Matrix<Real>> values;
    values.reserve(s.samples);
    const Real two_pi = Real(2) * pi<Real>();
    const Real radius(s.radius);
    for (std::size_t j = 0; j < s.samples; ++j) {
        const Real angle = two_pi * Real(static_cast<double>(j)) / Real(static_cast<double>(s.samples));
        const Complex<Real> zeta(radius * cos(angle), radius * sin(angle));
        values.push_back(weyl_mobius_interval(p, disk_to_halfplane(zeta), param));
    }
    return values;
}

/// Discrete Cauchy integral on the sampling circle: c_k = radius^{-k} (1/N) sum_j f_j e^{-2 pi i jk/N}.
template <class Real>
TaylorData<Real> taylor_numeric(const DiracPotential<Real>& p, const TaylorSampling& s, const Matrix<Real>& param) {
    using std::cos;
    using std::sin;
    p.validate();
    if (!(s.radius > 0.0 && s.radius < 1.0)) throw ValidationError("taylor_numeric: radius must lie in (0, 1)");
    if (s.samples < 2 * p.size()) throw ValidationError("taylor_numeric: need at least 2 (r+1) samples");
    const auto values = sample_disk_weyl(p, s, param);
    const Real two_pi = Real(2) * pi<Real>();
    const Real n(static_cast<double>(s.samples));
    TaylorData<Real> out{p.sig, {}};
    Real scale(1);
    for (std::size_t k = 0; k < p.size(); ++k) {
        Matrix<Real> c = Matrix<Real>::Zero(idx(p.sig.m2), idx(p.sig.m1));
        for (std::size_t j = 0; j < s.samples; ++j) {
            // j k mod N keeps the angle in [0, 2 pi).
            const Real angle = two_pi * Real(static_cast<double>((j * k) % s.samples)) / n;
            c += Complex<Real>(cos(angle), -sin(angle)) * values[j];
        }
        out.phi.push_back(c / (n * scale));
        scale *= Real(s.radius);
    }
    return out;
}

template <class Real>
TaylorData<Real> taylor_numeric(const DiracPotential<Real>& p, const TaylorSampling& s = {}) {
    return taylor_numeric(p, s, canonical_parameter<Real>(p.sig));
}

/// Largest elementwise deviation between two coefficient sequences of equal length.
template <class Real>
double max_coefficient_deviation(const TaylorData<Real>& a, const TaylorData<Real>& b) {
    if (!(a.sig == b.sig) || a.size() != b.size()) throw ValidationError("taylor data: shape mismatch");
    double out = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) out = std::max(out, max_abs(Matrix<Real>(a.phi[k] - b.phi[k])));
    return out;
}

}  // namespace dirac
