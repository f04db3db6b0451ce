#include <cmath>

#include <gtest/gtest.h>

#include "rsr/transform.hpp"
#include "rsr/verify.hpp"

using namespace rsr;

namespace {

SystemParams one_body() { return SystemParams(Periods(1.0, 2.0), 0.8, 1); }

AnalyticTestFunction bump(double center, double width = 1.0)
{
    AnalyticTestFunction f(1, width);
    f.center = {center};
    return f;
}

} // namespace

TEST(Transform, SingleParticleGaussianIsSelfReciprocal)
{
    auto g = bump(0.0, 1.0 / std::sqrt(pi));
    for (double l : {0.0, 0.5, 1.3})
        EXPECT_NEAR(std::abs(forward_t(g, {l}, one_body()).value - std::exp(-pi * l * l)), 0.0, 1e-12);
}

TEST(Transform, SingleParticleOracleShiftedGaussian)
{
    // Fourier pair of exp(-(x - c)^2 / s^2) under the kernel exp(-2 pi i l x).
    double c = 0.3, s = 0.8;
    auto f = bump(c, s);
    for (double l : {-0.4, 0.2, 0.9}) {
        cplx expect = s * std::sqrt(pi) * std::exp(-pi * pi * s * s * l * l) * std::exp(-2.0 * pi * I * l * c);
        EXPECT_LT(std::abs(forward_t(f, {l}, one_body()).value - expect), 1e-12);
    }
}

TEST(Transform, SingleParticleInversionAndParseval)
{
    for (const auto& f : suites::fourier_test_functions()) {
        EXPECT_LT(inversion_residual(f, {0.27}, one_body()).value, 1e-9);
        EXPECT_LT(parseval_residual(f, bump(-0.1, 0.9), one_body()).value, 1e-9);
    }
}

TEST(Transform, AdjointMirrorAndShiftCompatibility)
{
    SpecFunc chi = [](const RealTuple& l) { return std::exp(-pi * (l[0] - 0.1) * (l[0] - 0.1)) * cplx(1.0, 0.3 * l[0]); };
    auto f = bump(0.2);
    EXPECT_LT(adjointness_residual_n1(chi, f, one_body()).value, 1e-10);
    EXPECT_LT(mirror_residual_n1(chi, 0.3, one_body()).value, 1e-10);
    EXPECT_LT(shift_compat_residual(f, {0.3}, 0.25, one_body()).value, 1e-10);
}

TEST(Transform, IsometryAndSquareSingleParticleAllRegimes)
{
    auto a = suites::fourier_test_functions()[1], b = suites::fourier_test_functions()[2];
    for (const auto& p : suites::regime_representatives(1)) {
        EXPECT_LT(isometry_residual(a, b, p).value, 1e-8);
        EXPECT_LT(u_squared_residual(a, {0.31}, p).value, 1e-8);
    }
    EXPECT_THROW(forward_f(a, {0.1}, SystemParams(Periods(1.0, 2.0), cplx(0.8, 0.3), 1)), Error);
}

TEST(Transform, RegularizerValidation)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 1);
    RegularizerParams bad{2.0, 1.5};
    EXPECT_THROW(bad.validate(p), Error);
    RegularizerParams zero{2.0, 0.0};
    EXPECT_THROW(regularized_pairing_numeric(zero, {0.1}, {0.2}, p), Error);
    EXPECT_THROW(regularized_pairing_explicit(zero, {0.1}, {0.2}, p), Error);
}

TEST(Transform, RegularizedPairingSingleParticle)
{
    SystemParams p(Periods(1.0, 1.0), 0.5, 1);
    RegularizerParams reg{2.0, 0.2};
    auto num = regularized_pairing_numeric(reg, {0.3}, {-0.4}, p);
    EXPECT_LT(rel_diff(num.value, regularized_pairing_explicit(reg, {0.3}, {-0.4}, p)), 1e-6);
}

TEST(Transform, RegularizedPairingParityAndPhase)
{
    SystemParams p(Periods(1.0, 1.0), 0.5, 1);
    RegularizerParams reg{2.0, 0.2};
    auto a = regularized_pairing_numeric(reg, {0.3}, {-0.4}, p);
    auto b = regularized_pairing_numeric(reg, {0.4}, {-0.3}, p);
    EXPECT_LT(rel_diff(a.value, b.value), 1e-8);
    cplx e1 = regularized_pairing_explicit(reg, {0.3}, {-0.4}, p);
    cplx e2 = regularized_pairing_explicit(reg, {-0.4}, {0.3}, p);
    EXPECT_LT(std::abs(std::abs(e1) - std::abs(e2)), 1e-12 * std::abs(e1));
    RegularizerParams reg2{3.0, 0.2};
    cplx e3 = regularized_pairing_explicit(reg2, {0.3}, {-0.4}, p);
    EXPECT_LT(rel_diff(e3 / e1, std::exp(2.0 * pi * I * 0.7)), 1e-12);
}

TEST(Transform, RegularizerTendsToOne)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 2);
    RegularizerParams reg{30.0, 1e-8};
    EXPECT_LT(std::abs(regularizer_r(reg, {0.2, -0.3}, p) - 1.0), 1e-5);
    RegularizerParams coarse{2.0, 0.2};
    double prev = INFINITY;
    for (double l : {3.0, 6.0, 9.0}) {
        double m = std::abs(regularizer_r(coarse, {l, -l}, p));
        EXPECT_LT(m, prev);
        prev = m;
    }
}

TEST(Transform, DeltaProbeOfZeroIsZero)
{
    AnalyticTestFunction z(1, 1.0);
    z.poly = {{{}, 0.0}};
    for (cplx v : delta_probe(z, {0.3}, {{2.0, 0.1}}, one_body()))
        EXPECT_EQ(v, cplx(0.0));
}

TEST(Transform, RegimeThreeScalarProductSingleParticle)
{
    SystemParams p(Periods(1.0, 2.0), cplx(1.5, 0.3), 1);
    RegularizerParams reg{2.0, 0.2};
    auto num = regime34_scalar_numeric(reg, {0.2}, {-0.1}, p);
    auto ex = regime34_scalar_explicit(reg, {0.2}, {-0.1}, p);
    EXPECT_LT(rel_diff(num.value, ex.value), 1e-6);
    EXPECT_THROW(regime34_scalar_numeric(reg, {0.2}, {-0.1}, SystemParams(Periods(1.0, 2.0), 0.8, 1)), Error);
}

TEST(Transform, DeltaProbeApproachesTestFunction)
{
    auto f = bump(0.2);
    std::vector<RegularizerParams> sched{{2.0, 0.05}, {5.0, 2e-3}};
    auto v = delta_probe(f, {0.1}, sched, one_body());
    cplx target = f(PointTuple{0.1});
    ASSERT_EQ(v.size(), 2u);
    EXPECT_LT(std::abs(v[1] - target), std::abs(v[0] - target));
}

TEST(Transform, LogLinearFitRecoversSlope)
{
    std::vector<double> t{1.0, 2.0, 3.0, 4.0}, v;
    for (double x : t)
        v.push_back(std::exp(-3.5 * x + 0.25));
    auto fit = fit_log_linear(t, v);
    EXPECT_NEAR(fit.slope, -3.5, 1e-12);
}

TEST(Transform, ObservedRadiusFindsDecay)
{
    double r = observed_radius([](double x) { return std::exp(-x * x); }, 1e-12);
    EXPECT_GT(r, std::sqrt(std::log(1e12)));
    EXPECT_LT(r, 10.0);
}

TEST(Transform, ReducedTwoBodyFunctionMatchesQuadrature)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 2);
    TwoBody tb(p);
    WaveFunction wf(p);
    for (auto [l1, l2, x1, x2] : {std::tuple{0.3, -0.2, 0.4, -0.1}, std::tuple{0.05, 0.5, -0.6, 0.3}})
        EXPECT_LT(rel_diff(tb.psi({l1, l2}, {x1, x2}), wf({l1, l2}, {cplx(x1), cplx(x2)})), 1e-9);
}

TEST(Transform, TwoParticleForwardAgreesWithRescaledU)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 2);
    auto [a, b] = suites::pair_test_functions();
    RealTuple lam{0.3, -0.2}, ls{0.15, -0.1};
    auto u = rescaled_u(a, lam, p);
    auto f = forward_f(a, ls, p);
    cplx ref = std::sqrt(mu_hat(to_points(ls), p)) / 2.0 * f.value;
    EXPECT_LT(rel_diff(u.value, ref), 1e-8);
}

TEST(Transform, TwoParticleImageDecaysAndInverts)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 2);
    AnalyticTestFunction phi(2, 1.0);
    phi.center = {0.3, -0.2};
    TransformSpec spec;
    TwoBody tb(p, spec.psi_tol);
    auto img = image_n2(phi, tb, spec);
    auto fit = image_decay_slope(img, p);
    EXPECT_LT(fit.slope, 0.0);
    RealTuple x{0.25, -0.4};
    auto v = inverse_from_image(img, x, tb);
    EXPECT_LT(rel_diff(v.value, phi(to_points(x))), 1e-6);
}
