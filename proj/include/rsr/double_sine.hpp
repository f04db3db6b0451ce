#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rsr/quadrature.hpp"
#include "rsr/types.hpp"

namespace rsr {

struct Periods {
    cplx w1{1.0, 0.0};
    cplx w2{1.0, 0.0};

    Periods() = default;
    Periods(cplx a, cplx b) : w1(a), w2(b) {}

    cplx sum() const { return w1 + w2; }
    cplx prod() const { return w1 * w2; }

    void validate() const
    {
        if (!(w1.real() > 0.0) || !(w2.real() > 0.0))
            throw Error("periods violate Re w1 > 0, Re w2 > 0");
    }
};

enum class LatticeKind { pole, zero };

struct LatticePoint {
    int m1 = 0;
    int m2 = 0;
    LatticeKind kind = LatticeKind::zero;
    cplx location{};
};

class PoleError : public Error {
public:
    explicit PoleError(const LatticePoint& p)
        : Error("pole of S2 at m=(" + std::to_string(p.m1) + "," + std::to_string(p.m2) + ")"),
          point(p)
    {
    }
    LatticePoint point;
};

struct S2Eval {
    cplx value{};
    cplx log_value{};
    double error_estimate = 0.0;
    bool is_zero = false;
};

namespace detail {

inline cplx cexpm1(cplx z)
{
    double x = z.real(), y = z.imag();
    double em = std::expm1(x);
    double s = std::sin(0.5 * y);
    return {em * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

// log(2 sin w) avoiding overflow for large |Im w|.
inline cplx log_2sin(cplx w)
{
    double im = w.imag();
    if (im > 10.0)
        return cplx(0.0, 0.5 * pi) - I * w + std::log(1.0 - std::exp(2.0 * I * w));
    if (im < -10.0)
        return cplx(0.0, -0.5 * pi) + I * w + std::log(1.0 - std::exp(-2.0 * I * w));
    return std::log(2.0 * std::sin(w));
}

// Coefficients c_k of x/sh x = sum c_k y^k, y = x^2.
inline const std::array<double, 6>& inv_shc_series()
{
    static const std::array<double, 6> c = [] {
        std::array<double, 6> s{}, r{};
        double f = 1.0;
        for (int k = 0; k < 6; ++k) {
            s[k] = 1.0 / f;
            f *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
        }
        r[0] = 1.0;
        for (int k = 1; k < 6; ++k) {
            double acc = 0.0;
            for (int j = 1; j <= k; ++j)
                acc += s[j] * r[k - j];
            r[k] = -acc;
        }
        return r;
    }();
    return c;
}

inline std::array<cplx, 6> series_in_y(cplx scale, bool inverse)
{
    std::array<cplx, 6> out{};
    cplx y2 = scale * scale, p = 1.0;
    double f = 1.0;
    const auto& inv = inv_shc_series();
    for (int k = 0; k < 6; ++k) {
        out[k] = (inverse ? inv[k] : 1.0 / f) * p;
        p *= y2;
        f *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
    }
    return out;
}

inline std::array<cplx, 6> mul_series(const std::array<cplx, 6>& a, const std::array<cplx, 6>& b)
{
    std::array<cplx, 6> c{};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; i + j < 6; ++j)
            c[i + j] += a[i] * b[j];
    return c;
}

} // namespace detail

// Strip quadrature of ln S2; valid for 0 < Re z < Re(w1 + w2).
inline IntegralResult log_s2_strip_detailed(cplx z, const Periods& w, double rel_tol = 1e-14,
                                            double abs_tol = 1e-15)
{
    w.validate();
    cplx s = w.sum();
    if (!(z.real() > 0.0) || !(z.real() < s.real()))
        throw Error("outside integral-representation strip");
    cplx a = 2.0 * z - s;
    IntegralResult res;
    if (a == cplx(0.0, 0.0))
        return res;
    cplx pw = w.prod();
    double scale = std::max({std::abs(a), std::abs(w.w1), std::abs(w.w2), 1.0});
    double t0 = 0.15 / scale;

    // exact integral of the Taylor polynomial on [0, t0]
    auto p = detail::mul_series(detail::series_in_y(a, false),
                                detail::mul_series(detail::series_in_y(w.w1, true),
                                                   detail::series_in_y(w.w2, true)));
    cplx head = 0.0;
    for (int k = 1; k < 6; ++k)
        head += p[k] * std::pow(t0, 2 * k - 1) / (2.0 * k - 1.0);
    head *= a / (2.0 * pw);

    double re_s = s.real();
    auto integrand = [&](double t) -> cplx {
        cplx ratio;
        if (t * re_s < 20.0) {
            ratio = std::sinh(a * t) / (std::sinh(w.w1 * t) * std::sinh(w.w2 * t));
        } else {
            cplx num = std::exp((a - s) * t) - std::exp((-a - s) * t);
            cplx den = detail::cexpm1(-2.0 * w.w1 * t) * detail::cexpm1(-2.0 * w.w2 * t);
            ratio = 2.0 * num / den;
        }
        return (ratio - a / (pw * t)) / (2.0 * t);
    };

    double kappa = re_s - std::abs(a.real());
    double big_t = std::max(10.0 * t0, (std::log(1.0 / abs_tol) + 5.0) / kappa);
    double span = big_t - t0;
    double panel_len = std::min(2.0, 10.0 / (std::abs(a.imag()) + std::abs(w.w1.imag()) +
                                             std::abs(w.w2.imag()) + 1.0));
    int panels = std::max(1, static_cast<int>(std::ceil(span / panel_len)));
    // first panel near t0 carries the steepest variation
    auto body = integrate_interval(integrand, t0, big_t, rel_tol, abs_tol, 4000, panels);
    cplx tail = -a / (2.0 * pw * big_t);
    res.value = head + body.value + tail;
    res.error_estimate = body.error_estimate;
    res.nodes_used = body.nodes_used;
    res.converged = body.converged;
    return res;
}

inline cplx log_s2_strip(cplx z, const Periods& w)
{
    return log_s2_strip_detailed(z, w).value;
}

// Lattice point within tol of z (zeros at -m.w, poles at w1+w2+m.w), if any.
inline std::optional<LatticePoint> find_lattice_point(cplx z, const Periods& w, double tol)
{
    auto scan = [&](cplx target, LatticeKind kind) -> std::optional<LatticePoint> {
        // target = m1 w1 + m2 w2 with m_i >= 0
        double bound = target.real() / w.w2.real();
        if (bound < -1.0)
            return std::nullopt;
        int max_m2 = static_cast<int>(std::floor(bound)) + 1;
        for (int m2 = 0; m2 <= max_m2; ++m2) {
            cplx rem = target - static_cast<double>(m2) * w.w2;
            double m1f = (rem / w.w1).real();
            long m1 = std::lround(m1f);
            for (long c : {m1 - 1, m1, m1 + 1}) {
                if (c < 0)
                    continue;
                cplx loc_off = rem - static_cast<double>(c) * w.w1;
                if (std::abs(loc_off) <= tol) {
                    LatticePoint p;
                    p.m1 = static_cast<int>(c);
                    p.m2 = m2;
                    p.kind = kind;
                    p.location = kind == LatticeKind::zero
                                     ? -(static_cast<double>(c) * w.w1 + static_cast<double>(m2) * w.w2)
                                     : w.sum() + static_cast<double>(c) * w.w1 +
                                           static_cast<double>(m2) * w.w2;
                    return p;
                }
            }
        }
        return std::nullopt;
    };
    if (auto p = scan(-z, LatticeKind::zero))
        return p;
    return scan(z - w.sum(), LatticeKind::pole);
}

inline double lattice_tolerance(const Periods& w)
{
    return 1e-12 * std::min(w.w1.real(), w.w2.real());
}

enum class Route { automatic, via_w1, via_w2 };

inline S2Eval s2_detailed(cplx z, const Periods& w, Route route = Route::automatic)
{
    w.validate();
    S2Eval out;
    if (auto lp = find_lattice_point(z, w, lattice_tolerance(w))) {
        if (lp->kind == LatticeKind::pole)
            throw PoleError(*lp);
        out.value = 0.0;
        out.log_value = cplx(-std::numeric_limits<double>::infinity(), 0.0);
        out.is_zero = true;
        return out;
    }
    bool use_w1;
    if (route == Route::via_w1)
        use_w1 = true;
    else if (route == Route::via_w2)
        use_w1 = false;
    else
        use_w1 = w.w1.real() >= w.w2.real();
    cplx step = use_w1 ? w.w1 : w.w2;
    cplx other = use_w1 ? w.w2 : w.w1;
    double centre = 0.5 * w.sum().real();
    long k = std::lround((z.real() - centre) / step.real());
    if (std::labs(k) > 500)
        throw Error("continuation exceeds 500 period steps");
    // S2(z) = 2 sin(pi z / other) S2(z + step)
    cplx acc = 0.0;
    cplx zz = z;
    if (k < 0) {
        for (long i = 0; i < -k; ++i) {
            acc += detail::log_2sin(pi * zz / other);
            zz += step;
        }
    } else {
        for (long i = 0; i < k; ++i) {
            zz -= step;
            acc -= detail::log_2sin(pi * zz / other);
        }
    }
    auto strip = log_s2_strip_detailed(zz, w);
    out.log_value = acc + strip.value;
    out.value = std::exp(out.log_value);
    out.error_estimate = strip.error_estimate * std::abs(out.value);
    return out;
}

inline cplx s2(cplx z, const Periods& w, Route route = Route::automatic)
{
    return s2_detailed(z, w, route).value;
}

inline cplx b22(cplx z, const Periods& w)
{
    cplx d = z - 0.5 * w.sum();
    return (d * d - (w.w1 * w.w1 + w.w2 * w.w2) / 12.0) / w.prod();
}

inline cplx s2_asymptotic(cplx z, const Periods& w)
{
    if (z.imag() == 0.0)
        throw Error("asymptotic sign undefined on axis");
    double sgn = z.imag() > 0.0 ? 1.0 : -1.0;
    return std::exp(sgn * I * (0.5 * pi) * b22(z, w));
}

inline cplx hyperbolic_gamma(cplx z, const Periods& w)
{
    return s2(I * z + 0.5 * w.sum(), w);
}

inline cplx faddeev_dilog(cplx z, const Periods& w)
{
    cplx e = I * pi / (2.0 * w.prod()) * (z * z + (w.w1 * w.w1 + w.w2 * w.w2) / 12.0);
    return s2(-I * z + 0.5 * w.sum(), w) * std::exp(e);
}

inline std::vector<LatticePoint> pole_zero_lattice(const Periods& w, double radius)
{
    if (!(radius > 0.0))
        throw Error("radius must be positive");
    w.validate();
    std::vector<LatticePoint> out;
    int m1max = static_cast<int>(std::ceil(radius / w.w1.real())) + 1;
    int m2max = static_cast<int>(std::ceil(radius / w.w2.real())) + 1;
    for (int m1 = 0; m1 <= m1max; ++m1)
        for (int m2 = 0; m2 <= m2max; ++m2) {
            cplx m = static_cast<double>(m1) * w.w1 + static_cast<double>(m2) * w.w2;
            if (std::abs(m) <= radius)
                out.push_back({m1, m2, LatticeKind::zero, -m});
            cplx p = w.sum() + m;
            if (std::abs(p) <= radius)
                out.push_back({m1, m2, LatticeKind::pole, p});
        }
    std::stable_sort(out.begin(), out.end(), [](const LatticePoint& a, const LatticePoint& b) {
        return std::abs(a.location) < std::abs(b.location);
    });
    return out;
}

} // namespace rsr
