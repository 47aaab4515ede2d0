#pragma once

// 113-bit binary floating point for pipelines whose potentials are too
// ill-conditioned for double. Requires GNU extensions and libquadmath.
//
// Products of j-unitary factors grow exponentially with the interval length,
// so the condition number of C_k exceeds 1/eps_double long before r = 15 at
// moderate Schur coefficient norms.

#include <boost/multiprecision/float128.hpp>

#include <Eigen/Core>

#include <complex>
#include <limits>

namespace dirac {
using quad = boost::multiprecision::float128;
}  // namespace dirac

// Boost 1.74's own Eigen adapter predates Eigen 3.4 (no infinity()/quiet_NaN()),
// so the traits are declared here.
namespace Eigen {
template <>
struct NumTraits<dirac::quad> : GenericNumTraits<dirac::quad> {
    using Real = dirac::quad;
    using NonInteger = dirac::quad;
    using Nested = dirac::quad;
    using Literal = dirac::quad;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 1,
        AddCost = 4,
        MulCost = 8
    };
    static inline Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
    static inline Real dummy_precision() { return Real(1e-30); }
    static inline Real highest() { return (std::numeric_limits<Real>::max)(); }
    static inline Real lowest() { return -(std::numeric_limits<Real>::max)(); }
    static inline Real infinity() { return std::numeric_limits<Real>::infinity(); }
    static inline Real quiet_NaN() { return std::numeric_limits<Real>::quiet_NaN(); }
    static inline int digits10() { return std::numeric_limits<Real>::digits10; }
};
}  // namespace Eigen
