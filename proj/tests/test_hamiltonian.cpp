#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rsr/hamiltonian.hpp"

using namespace rsr;

namespace {

AnalyticTestFunction gaussian(int n, double width, RealTuple center)
{
    AnalyticTestFunction f(n, width);
    f.center = std::move(center);
    return f;
}

} // namespace

TEST(Hamiltonian, ElementarySymmetricPolynomials)
{
    PointTuple z{1.0, 2.0, 3.0};
    EXPECT_EQ(elementary_symmetric(0, z), cplx(1.0));
    EXPECT_EQ(elementary_symmetric(1, z), cplx(6.0));
    EXPECT_EQ(elementary_symmetric(2, z), cplx(11.0));
    EXPECT_EQ(elementary_symmetric(3, z), cplx(6.0));
}

TEST(Hamiltonian, SingleParticleShiftOfPlaneWave)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 1);
    double l = 0.37;
    Func wave = [&](const PointTuple& x) { return std::exp(2.0 * pi * I * l * x[0]); };
    PointTuple x{0.2};
    cplx h = apply_h_s(1, wave, x, p);
    EXPECT_LT(rel_diff(h, std::exp(2.0 * pi * p.w.w1 * l) * wave(x)), 1e-13);
}

TEST(Hamiltonian, TestFunctionIsSymmetricAndDecays)
{
    AnalyticTestFunction f = gaussian(2, 0.9, {0.1, 0.4});
    f.poly = {{{}, 1.0}, {{1}, cplx(0.2, 0.1)}, {{2, 1}, 0.05}};
    PointTuple x{0.3, -0.8}, xs{-0.8, 0.3};
    EXPECT_LT(rel_diff(f(x), f(xs)), 1e-14);
    EXPECT_TRUE(f.satisfies_decay_probe(SystemParams(Periods(1.0, 2.0), 0.8, 2)));
    EXPECT_GT(f.truncation_radius(1e-12), 3.0);
    EXPECT_THROW(f(PointTuple{0.1}), Error);
}

TEST(Hamiltonian, GeneratingFunctionMatchesOperatorsHs)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 2);
    auto f = gaussian(2, 1.0, {0.2, -0.3}).as_func();
    HOp h = HOp::standard(p);
    PointTuple x{0.4, -0.25};
    for (double l : {-0.3, 0.5})
        EXPECT_LT(rel_diff(apply_h_gen(l, f, x, h), apply_h_gen_from_hs(l, f, x, h)), 1e-12);
}

TEST(Hamiltonian, OperatorsCommuteThreeParticles)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 3);
    auto f = gaussian(3, 1.0, {0.1, -0.2, 0.3}).as_func();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        PointTuple x{cplx(u(rng)), cplx(u(rng)), cplx(u(rng))};
        EXPECT_LT(commute_residual(1, 2, f, x, p), 1e-9);
        EXPECT_LT(commute_residual(1, 3, f, x, p), 1e-9);
    }
}

TEST(Hamiltonian, SimilarityToReflectedCoupling)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& p : {SystemParams(Periods(1.0, 2.0), 0.8, 2), SystemParams(Periods(1.0, 2.0), 0.7, 3),
                          SystemParams(Periods(cplx(1.0, 0.5), cplx(1.0, -0.5)), cplx(0.7, 0.2), 2)}) {
        AnalyticTestFunction f(p.n, 1.0);
        for (int i = 0; i < 10; ++i) {
            PointTuple x(p.n);
            for (auto& v : x)
                v = u(rng);
            EXPECT_LT(similarity_residual(u(rng), f.as_func(), x, p), 1e-9);
        }
    }
}

TEST(Hamiltonian, EigenvalueEquationsTwoParticles)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 2);
    auto r = eigen_residual({0.21, -0.34}, {0.15, -0.4}, p, EigenMode::plain, {0.1});
    EXPECT_LT(r.max(), 1e-8);
}

TEST(Hamiltonian, BilinearSymmetrySingleParticle)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 1);
    auto a = gaussian(1, 1.0, {0.3});
    auto b = gaussian(1, 0.8, {-0.2});
    b.poly = {{{}, 1.0}, {{1}, cplx(0.3, -0.2)}};
    for (Weight w : {Weight::mu, Weight::delta}) {
        auto pr = bilinear_h_pairings(a.as_func(), b.as_func(), 0.4, w, p, pairing_spec(8.0, 1e-11));
        EXPECT_LT(rel_diff(pr.first.value, pr.second.value), 1e-9);
    }
}

TEST(Hamiltonian, SesquilinearSymmetryRegimeOneTwoParticles)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 2);
    auto a = gaussian(2, 1.0, {0.3, -0.2});
    auto b = gaussian(2, 0.9, {-0.1, 0.4});
    auto pr = sesquilinear_h_pairings(a.as_func(), b.as_func(), 0.2, Weight::mu, p, false,
                                      pairing_spec(a.truncation_radius(1e-10), 1e-8));
    EXPECT_LT(rel_diff(pr.first.value, pr.second.value), 1e-6);
}

TEST(Hamiltonian, SesquilinearPairingRequiresRegime)
{
    SystemParams p(Periods(1.0, 2.0), cplx(0.8, 0.3), 1);
    auto a = gaussian(1, 1.0, {0.0});
    EXPECT_THROW(sesquilinear_pairing(a.as_func(), a.as_func(), Weight::mu, p, pairing_spec(6.0)), Error);
}

TEST(Hamiltonian, BilinearPairingSingleParticleIsPlainIntegral)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 1);
    auto a = gaussian(1, 1.0 / std::sqrt(pi), {0.0});
    auto r = bilinear_pairing(a.as_func(), a.as_func(), Weight::mu, p, pairing_spec(8.0, 1e-12));
    EXPECT_NEAR(std::abs(r.value - 1.0 / std::sqrt(2.0)), 0.0, 1e-10);
}
