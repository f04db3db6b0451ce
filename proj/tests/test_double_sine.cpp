#include <cmath>
#include <limits>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include "rsr/double_sine.hpp"

using namespace rsr;

namespace {

// Direct integral representation for real 0 < z < w1 + w2.
double s2_integral_oracle(double z, double a, double b)
{
    using ld = long double;
    boost::math::quadrature::exp_sinh<ld> q;
    ld s = a + b - 2.0L * z;
    ld delta = 1e-4L;
    ld head = s * (s * s - ld(a) * a - ld(b) * b) / (12.0L * a * b) * delta;
    auto f = [&](ld t) -> ld {
        ld r = (std::exp((s - a - b) * t) - std::exp((-s - a - b) * t)) /
               (std::expm1(-2.0L * a * t) * std::expm1(-2.0L * b * t));
        return (r - s / (2.0L * a * b * t)) / t;
    };
    return static_cast<double>(std::exp(-(head + q.integrate(f, delta, std::numeric_limits<ld>::infinity()))));
}

std::vector<Periods> period_sets()
{
    return {Periods(1.0, 1.0), Periods(1.0, 2.0), Periods(cplx(1.0, 0.5), cplx(1.0, -0.5)), Periods(0.7, 1.9)};
}

} // namespace

TEST(DoubleSine, SpecialValues)
{
    Periods w(1.0, 2.0);
    EXPECT_NEAR(std::abs(s2(1.0, w) - std::sqrt(2.0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(s2(2.0, w) - 1.0 / std::sqrt(2.0)), 0.0, 1e-12);
    for (const auto& p : period_sets())
        EXPECT_NEAR(std::abs(s2(0.5 * p.sum(), p) - 1.0), 0.0, 1e-12);
}

TEST(DoubleSine, MatchesIntegralOracle)
{
    for (auto [a, b] : {std::pair{1.0, 2.0}, std::pair{1.0, 1.0}, std::pair{0.7, 1.9}})
        for (double t : {0.1, 0.35, 0.6, 0.85}) {
            double z = t * (a + b);
            EXPECT_NEAR(std::abs(s2(z, Periods(a, b)) / s2_integral_oracle(z, a, b) - 1.0), 0.0, 1e-10)
                << "z=" << z << " w=" << a << "," << b;
        }
}

TEST(DoubleSine, DifferenceAndReflectionProperties)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& w : period_sets())
        for (int i = 0; i < 40; ++i) {
            cplx z(0.05 * w.sum().real() + 0.9 * w.sum().real() * u(rng), 3.0 * u(rng) - 1.5);
            cplx s = s2(z, w);
            EXPECT_LT(std::abs(s / (2.0 * std::sin(pi * z / w.w2) * s2(z + w.w1, w)) - 1.0), 1e-11);
            EXPECT_LT(std::abs(s / (2.0 * std::sin(pi * z / w.w1) * s2(z + w.w2, w)) - 1.0), 1e-11);
            EXPECT_LT(std::abs(s * s2(w.sum() - z, w) - 1.0), 1e-12);
        }
}

TEST(DoubleSine, HomogeneityAndSwap)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 3.0);
    for (const auto& w : period_sets())
        for (int i = 0; i < 20; ++i) {
            cplx z(u(rng), 0.5 * u(rng));
            if (find_lattice_point(z, w, 1e-3))
                continue;
            cplx s = s2(z, w);
            EXPECT_LT(std::abs(s2(2.5 * z, Periods(2.5 * w.w1, 2.5 * w.w2)) / s - 1.0), 1e-11);
            EXPECT_LT(std::abs(s2(z, Periods(w.w2, w.w1)) / s - 1.0), 1e-11);
            EXPECT_LT(std::abs(s2(z, w, Route::via_w1) / s2(z, w, Route::via_w2) - 1.0), 1e-10);
        }
}

TEST(DoubleSine, LinearZeroAtOrigin)
{
    for (const auto& w : period_sets()) {
        double eps = 1e-6;
        cplx slope = s2(eps, w) / eps;
        EXPECT_LT(std::abs(slope / (2.0 * pi / std::sqrt(w.prod())) - 1.0), 1e-5);
    }
}

TEST(DoubleSine, ZeroAndPoleLattice)
{
    Periods w(1.0, 2.0);
    EXPECT_TRUE(s2_detailed(0.0, w).is_zero);
    EXPECT_TRUE(s2_detailed(-1.0, w).is_zero);
    EXPECT_THROW(s2(3.0, w), PoleError);
    EXPECT_THROW(s2(4.0, w), PoleError);
    auto lat = pole_zero_lattice(w, 3.5);
    int zeros = 0, poles = 0;
    for (const auto& p : lat) {
        (p.kind == LatticeKind::zero ? zeros : poles)++;
        auto hit = find_lattice_point(p.location, w, 1e-9);
        ASSERT_TRUE(hit.has_value());
        EXPECT_EQ(hit->kind, p.kind);
    }
    EXPECT_GT(zeros, 0);
    EXPECT_GT(poles, 0);
}

TEST(DoubleSine, AsymptoticsAlongRays)
{
    for (const auto& w : {Periods(1.0, 1.0), Periods(1.0, 2.0)})
        for (double re : {-3.0, 0.0, 1.5, 4.0})
            for (double im : {10.0, -10.0})
                EXPECT_LT(std::abs(s2(cplx(re, im), w) / s2_asymptotic(cplx(re, im), w) - 1.0), 1e-4);
}

TEST(DoubleSine, HyperbolicGammaAndDilogAreConsistent)
{
    Periods w(1.0, 2.0);
    for (cplx z : {cplx(0.2, 0.1), cplx(-0.3, 0.4)}) {
        cplx g = hyperbolic_gamma(z, w);
        EXPECT_TRUE(std::isfinite(std::abs(g)));
        EXPECT_LT(std::abs(g * hyperbolic_gamma(-z, w) - 1.0), 1e-11);
        EXPECT_TRUE(std::isfinite(std::abs(faddeev_dilog(z, w))));
    }
}

TEST(DoubleSine, RejectsInvalidPeriods)
{
    EXPECT_THROW(s2(0.5, Periods(-1.0, 2.0)), Error);
}
