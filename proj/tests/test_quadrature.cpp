#include <cmath>
#include <span>

#include <gtest/gtest.h>

#include "rsr/quadrature.hpp"

using namespace rsr;

namespace {

QuadratureSpec box(double r, double rel = 1e-11)
{
    QuadratureSpec s;
    s.rel_tol = rel;
    s.abs_tol = 1e-15;
    s.truncation_radius = {r};
    return s;
}

} // namespace

TEST(Quadrature, GaussianLine)
{
    auto r = integrate_line([](double x) { return cplx(std::exp(-x * x)); }, box(7.0));
    EXPECT_NEAR(r.value.real(), std::sqrt(pi), 1e-12);
    EXPECT_TRUE(r.converged);
}

TEST(Quadrature, OscillatoryInterval)
{
    auto r = integrate_interval([](double x) { return cplx(std::cos(5.0 * x)); }, -1.0, 1.0, 1e-13, 1e-16);
    EXPECT_NEAR(r.value.real(), 2.0 * std::sin(5.0) / 5.0, 1e-13);
}

TEST(Quadrature, AlgebraicTailTruncation)
{
    double R = 20.0;
    auto r = integrate_line([](double x) { return cplx(1.0 / (1.0 + x * x)); }, box(R));
    EXPECT_NEAR(r.value.real(), 2.0 * std::atan(R), 1e-11);
}

TEST(Quadrature, ContourShiftOfEntireGaussian)
{
    for (double c : {-0.7, 0.3, 1.2}) {
        auto r = integrate_line_shifted([](cplx t) { return std::exp(-t * t); }, c, box(8.0));
        EXPECT_NEAR(std::abs(r.value - std::sqrt(pi)), 0.0, 1e-11) << "c=" << c;
    }
}

TEST(Quadrature, TwoDimensionalBox)
{
    auto f = [](std::span<const double> t) { return cplx(std::exp(-t[0] * t[0] - 2.0 * t[1] * t[1])); };
    auto r = integrate_box(f, 2, box(7.0, 1e-10));
    EXPECT_NEAR(r.value.real(), pi / std::sqrt(2.0), 1e-9);
    EXPECT_GT(r.nodes_used, 0);
}

TEST(Quadrature, ThreeDimensionalProduct)
{
    auto f = [](std::span<const double> t) {
        return cplx((1.0 + t[0] * t[0]) * std::exp(-t[0] * t[0] - t[1] * t[1] - t[2] * t[2]));
    };
    auto r = integrate_box(f, 3, box(7.0, 1e-8));
    EXPECT_NEAR(r.value.real(), 1.5 * std::pow(pi, 1.5), 1e-7);
}

TEST(Quadrature, RejectsUnsupportedDimension)
{
    auto f = [](std::span<const double>) { return cplx(1.0); };
    EXPECT_THROW(integrate_box(f, 5, box(1.0)), Error);
    QuadratureSpec empty;
    empty.truncation_radius.clear();
    EXPECT_THROW(integrate_box(f, 1, empty), Error);
}

TEST(Quadrature, ErrorEstimateBoundsActualError)
{
    auto r = integrate_interval([](double x) { return cplx(std::exp(x)); }, 0.0, 1.0, 1e-6, 1e-16);
    EXPECT_LE(std::abs(r.value.real() - (std::exp(1.0) - 1.0)), std::max(r.error_estimate, 1e-15));
}
