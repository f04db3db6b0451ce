#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rsr/wavefunction.hpp"

using namespace rsr;

TEST(WaveFunction, SingleParticleIsPlaneWave)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 1);
    for (double l : {-0.7, 0.0, 0.45})
        for (double x : {-1.2, 0.3}) {
            cplx expect = std::exp(2.0 * pi * I * l * x);
            EXPECT_LT(std::abs(psi({l}, {cplx(x)}, p) - expect), 1e-14);
        }
}

TEST(WaveFunction, FreeCouplingDetected)
{
    EXPECT_TRUE(is_free_coupling(SystemParams(Periods(1.0, 2.0), 1.0, 2)));
    EXPECT_TRUE(is_free_coupling(SystemParams(Periods(1.0, 2.0), 2.0, 2)));
    EXPECT_FALSE(is_free_coupling(SystemParams(Periods(1.0, 2.0), 0.8, 2)));
}

TEST(WaveFunction, QuadratureReproducesFreeClosedForm)
{
    SystemParams p(Periods(1.0, 2.0), 2.0, 2);
    PsiOptions opt;
    opt.free_fast_path = false;
    WaveFunction wf(p, opt);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 3; ++i) {
        RealTuple lam{u(rng), u(rng)};
        PointTuple x{cplx(u(rng)), cplx(u(rng))};
        auto r = wf.eval(lam, x);
        EXPECT_TRUE(r.converged);
        EXPECT_LT(rel_diff(r.value, psi_free(lam, x, p)), 1e-8);
    }
}

TEST(WaveFunction, FreeClosedFormIsSymmetric)
{
    SystemParams p(Periods(1.0, 2.0), 1.0, 2);
    RealTuple lam{0.3, -0.2};
    PointTuple x{0.4, -0.7}, xs{-0.7, 0.4};
    EXPECT_LT(rel_diff(psi_free(lam, x, p), psi_free(lam, xs, p)), 1e-13);
    EXPECT_LT(rel_diff(psi_free(lam, x, p), psi_free({-0.2, 0.3}, x, p)), 1e-13);
}

class SymmetryProperty : public ::testing::TestWithParam<std::string> {};

TEST_P(SymmetryProperty, ResidualSmallAtSeededPoints)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 2);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    RealTuple lam{u(rng), u(rng)};
    PointTuple x{cplx(u(rng)), cplx(u(rng))};
    EXPECT_LT(symmetry_residual(parse_symmetry(GetParam()), lam, x, p), 1e-8);
}

INSTANTIATE_TEST_SUITE_P(AllKinds, SymmetryProperty, ::testing::ValuesIn(symmetry_names()));

TEST(WaveFunction, ComplexPeriodsSymmetries)
{
    SystemParams p(Periods(cplx(1.0, 0.5), cplx(1.0, -0.5)), 0.8, 2);
    RealTuple lam{0.2, -0.3};
    PointTuple x{0.35, -0.1};
    EXPECT_LT(symmetry_residual(SymmetryKind::parity, lam, x, p), 1e-8);
    EXPECT_LT(symmetry_residual(SymmetryKind::coupling_reflection, lam, x, p), 1e-8);
}

TEST(WaveFunction, UnknownSymmetryRejected)
{
    EXPECT_THROW(parse_symmetry("time-reversal"), Error);
}

TEST(WaveFunction, EnvelopeBoundsGrowth)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 2);
    RealTuple lam{0.4, -0.1};
    double worst = 0.0;
    for (double s : {0.25, 1.0, 2.0, 3.0}) {
        PointTuple x{cplx(s), cplx(-s)};
        worst = std::max(worst, std::abs(psi(lam, x, p)) / psi_envelope(lam, x, p, 0.0, 1.0));
    }
    EXPECT_LT(worst, 10.0);
}

TEST(WaveFunction, ArityChecked)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 2);
    EXPECT_THROW(psi({0.1}, {0.2, 0.3}, p), Error);
}
