#include "support.hpp"

using namespace dirac;
using namespace dirac::testing;

TEST(DiskToHalfplane, Points) {
    EXPECT_LT(std::abs(disk_to_halfplane(cplx(0)) - cplx(0, 1)), 1e-15);
    EXPECT_LT(std::abs(disk_to_halfplane(cplx(1))), 1e-15);
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const cplx zeta = std::polar(0.999 * u(gen), 2 * M_PI * u(gen));
        EXPECT_GT(disk_to_halfplane(zeta).imag(), 0.0);
    }
    EXPECT_THROW(disk_to_halfplane(cplx(-1)), ValidationError);
}

TEST(TaylorFromPhiStack, ZerosAndTelescoping) {
    const Signature sig{2, 1};
    const auto zero = taylor_from_phi_stack(Mat(Mat::Zero(3, 2)), sig);
    ASSERT_EQ(zero.size(), 3U);
    for (const auto& f : zero.phi) EXPECT_EQ(max_abs(f), 0.0);

    std::mt19937_64 gen(2);
    const Mat f0 = random_matrix(gen, 1, 2);
    const Mat f1 = random_matrix(gen, 1, 2);
    Mat stack(2, 2);
    stack.topRows(1) = -f0;
    stack.bottomRows(1) = -(f0 + f1);
    const auto t = taylor_from_phi_stack(stack, sig);
    EXPECT_LT(max_diff(t.phi[0], f0), 1e-15);
    EXPECT_LT(max_diff(t.phi[1], f1), 1e-15);
    EXPECT_THROW(taylor_from_phi_stack(Mat(Mat::Zero(3, 1)), sig), ValidationError);
}

TEST(TaylorAlgebraic, TrivialPotentialGivesZeros) {
    for (const auto& sig : signatures()) {
        const auto t = taylor_algebraic(trivial_potential(4, sig));
        ASSERT_EQ(t.size(), 5U);
        for (const auto& f : t.phi) EXPECT_LT(max_abs(f), 1e-15);
    }
}

TEST(TaylorAlgebraic, SingleLevelScalar) {
    // C_0 from rho_0 = 0.5: gamma = [-1, 2]/sqrt(3), phi_0 = -gamma_1 / gamma_2 = 1/2.
    Mat rho(1, 1);
    rho << 0.5;
    const auto p = schur_to_dirac(SchurSequence<double>{{1, 1}, {rho}}).potential;
    const Mat gamma = beta_gamma(p.C[0], p.sig).gamma;
    const cplx oracle = -gamma(0, 0) / gamma(0, 1);
    const auto t = taylor_algebraic(p);
    EXPECT_LT(std::abs(t.phi[0](0, 0) - oracle), 1e-14);
    EXPECT_LT(std::abs(t.phi[0](0, 0) - 0.5), 1e-14);
}

TEST(TaylorNumeric, TrivialPotentialGivesZeros) {
    const auto t = taylor_numeric(trivial_potential(3, {1, 2}));
    for (const auto& f : t.phi) EXPECT_LT(max_abs(f), 1e-10);
}

TEST(TaylorNumeric, RejectsBadSampling) {
    const auto p = trivial_potential(3, {1, 1});
    EXPECT_THROW(taylor_numeric(p, {1.0, 64}), ValidationError);
    EXPECT_THROW(taylor_numeric(p, {0.0, 64}), ValidationError);
    EXPECT_THROW(taylor_numeric(p, {0.1, 7}), ValidationError);
}

template <class Real>
class Taylor : public ::testing::Test {};
TYPED_TEST_SUITE(Taylor, Reals);

TYPED_TEST(Taylor, StructuredMatrixOfForwardDataIsPositive) {
    using Real = TypeParam;
    for (const auto& sig : signatures()) {
        const auto t = taylor_algebraic(random_potential<Real>(3, max_r<Real>(), sig));
        EXPECT_GT(min_hermitian_eigenvalue(structured_S(t)), 0.0);
    }
}

TYPED_TEST(Taylor, NumericMatchesAlgebraic) {
    using Real = TypeParam;
    const std::size_t r_max = std::is_same_v<Real, double> ? 4 : 10;
    for (const auto& sig : signatures()) {
        for (std::size_t r : {std::size_t{0}, std::size_t{3}, r_max}) {
            const auto p = random_potential<Real>(40 + r, r, sig);
            const double dev = max_coefficient_deviation(taylor_numeric(p), taylor_algebraic(p));
            EXPECT_LT(dev, 1e-6) << "r = " << r;
        }
    }
}

TYPED_TEST(Taylor, NumericIsParameterIndependent) {
    using Real = TypeParam;
    std::mt19937_64 gen(4);
    const std::size_t r = std::is_same_v<Real, double> ? 4 : 10;
    for (const auto& sig : signatures()) {
        const auto p = random_potential<Real>(5, r, sig);
        const auto base = taylor_numeric(p);
        for (int k = 0; k < 2; ++k) {
            const Matrix<Real> param = random_property_j<Real>(gen, sig);
            EXPECT_LT(max_coefficient_deviation(taylor_numeric(p, {}, param), base), 1e-6);
        }
    }
}

TYPED_TEST(Taylor, PrefixesAreStableUnderTruncation) {
    using Real = TypeParam;
    const std::size_t r = max_r<Real>();
    const auto p = random_potential<Real>(6, r, {2, 2});
    const auto full = taylor_algebraic(p);
    for (std::size_t k = 0; k < r; ++k) {
        const auto part = taylor_algebraic(p.truncated(k));
        EXPECT_LT(max_coefficient_deviation(part, full.truncated(k)), precise<Real>(1e-10, 1e-26));
    }
}

TYPED_TEST(Taylor, SampledWeylFunctionIsNonExpansive) {
    using Real = TypeParam;
    for (const auto& sig : signatures()) {
        const auto p = random_potential<Real>(7, max_r<Real>(), sig);
        for (const auto& v : sample_disk_weyl(p, {}, canonical_parameter<Real>(sig))) {
            EXPECT_LE(spectral_norm(v), 1.0 + 1e-9);
        }
    }
}
