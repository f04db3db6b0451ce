#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "rsr/measures.hpp"
#include "rsr/params.hpp"
#include "rsr/quadrature.hpp"
#include "rsr/types.hpp"
#include "rsr/wavefunction.hpp"

namespace rsr {

using Func = std::function<cplx(const PointTuple&)>;

// Gaussian times symmetric polynomial times pairwise Gaussian damping.
struct AnalyticTestFunction {
    int n = 1;
    double width = 1.0;
    RealTuple center;
    std::map<std::vector<int>, cplx> poly{{{}, 1.0}};
    double damping = 0.0;

    AnalyticTestFunction() = default;
    AnalyticTestFunction(int particles, double w = 1.0) : n(particles), width(w), center(particles, 0.0) {}

    static cplx monomial_symmetric(std::vector<int> alpha, const PointTuple& x)
    {
        alpha.resize(x.size(), 0);
        std::sort(alpha.begin(), alpha.end());
        cplx acc = 0.0;
        do {
            cplx t = 1.0;
            for (std::size_t j = 0; j < x.size(); ++j)
                for (int e = 0; e < alpha[j]; ++e)
                    t *= x[j];
            acc += t;
        } while (std::next_permutation(alpha.begin(), alpha.end()));
        return acc;
    }

    cplx polynomial(const PointTuple& x) const
    {
        cplx acc = 0.0;
        for (const auto& [alpha, c] : poly)
            acc += c * monomial_symmetric(alpha, x);
        return acc;
    }

    cplx operator()(const PointTuple& x) const
    {
        if (static_cast<int>(x.size()) != n)
            throw Error("test function arity mismatch");
        RealTuple c = center.empty() ? RealTuple(n, 0.0) : center;
        std::sort(c.begin(), c.end());
        cplx gsum = 0.0;
        int count = 0;
        do {
            cplx e = 0.0;
            for (int j = 0; j < n; ++j)
                e += (x[j] - c[j]) * (x[j] - c[j]);
            gsum += std::exp(-e / (width * width));
            ++count;
        } while (std::next_permutation(c.begin(), c.end()));
        gsum /= static_cast<double>(count);
        cplx damp = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                damp += (x[j] - x[k]) * (x[j] - x[k]);
        return polynomial(x) * gsum * std::exp(-damping * damp);
    }

    Func as_func() const
    {
        auto self = *this;
        return [self](const PointTuple& x) { return self(x); };
    }

    int degree() const
    {
        int d = 0;
        for (const auto& kv : poly) {
            int s = 0;
            for (int a : kv.first)
                s += a;
            d = std::max(d, s);
        }
        return d;
    }

    double truncation_radius(double tol) const
    {
        double cm = 0.0;
        for (double v : center)
            cm = std::max(cm, std::abs(v));
        return cm + width * std::sqrt(std::log(1.0 / tol) + 4.0 * degree() + 12.0);
    }

    // Probe of the strip decay requirement: |phi| against exp(-2 pi Re g^ sum|x_j - x_k| - eps sum|x_j|).
    bool satisfies_decay_probe(const SystemParams& p, double eps = 0.1) const
    {
        double gh = (p.g / p.w.prod()).real();
        double strip = 0.5 * p.w.w1.real();
        double worst = 0.0;
        for (double r = 2.0; r <= 12.0; r += 2.0)
            for (double s : {-strip, 0.0, strip}) {
                PointTuple x(n);
                for (int j = 0; j < n; ++j)
                    x[j] = cplx(r * (j % 2 ? -1.0 : 1.0) * (1.0 + 0.3 * j), s);
                double pair = 0.0, single = 0.0;
                for (int j = 0; j < n; ++j) {
                    single += std::abs(x[j].real());
                    for (int k = j + 1; k < n; ++k)
                        pair += std::abs((x[j] - x[k]).real());
                }
                double env = std::exp(-2.0 * pi * gh * pair - eps * single);
                worst = std::max(worst, std::abs((*this)(x)) / env);
            }
        return std::isfinite(worst) && worst < 1e6;
    }
};

// H(lambda | a, b) with shift period a, coefficient period b and coupling g.
struct HOp {
    cplx a, b, g;
    int n;

    static HOp standard(const SystemParams& p) { return {p.w.w1, p.w.w2, p.g, p.n}; }
    static HOp swapped(const SystemParams& p) { return {p.w.w2, p.w.w1, p.g, p.n}; }
};

inline std::vector<std::vector<int>> subsets_of_size(int n, int s)
{
    std::vector<std::vector<int>> out;
    for (unsigned m = 0; m < (1u << n); ++m)
        if (__builtin_popcount(m) == s) {
            std::vector<int> v;
            for (int j = 0; j < n; ++j)
                if (m & (1u << j))
                    v.push_back(j);
            out.push_back(v);
        }
    return out;
}

inline bool in_mask(unsigned mask, int j) { return (mask >> j) & 1u; }

inline cplx h_coefficient(const HOp& h, unsigned mask, const PointTuple& x)
{
    cplx c = 1.0;
    for (int j = 0; j < h.n; ++j)
        for (int k = 0; k < h.n; ++k)
            if (in_mask(mask, j) && !in_mask(mask, k)) {
                cplx d = x[j] - x[k];
                cplx den = std::sinh(pi * d / h.b);
                if (std::abs(den) < 1e-300)
                    throw Error("H_s coefficient singular");
                c *= std::sinh(pi * (d - I * h.g) / h.b) / den;
            }
    return c;
}

inline PointTuple shifted_full(const PointTuple& x, unsigned mask, cplx a)
{
    PointTuple y = x;
    for (std::size_t j = 0; j < x.size(); ++j)
        if (in_mask(mask, static_cast<int>(j)))
            y[j] -= I * a;
    return y;
}

// x - xi^J with xi_j = i a/2 on J and -i a/2 off J.
inline PointTuple shifted_half(const PointTuple& x, unsigned mask, cplx a)
{
    PointTuple y = x;
    for (std::size_t j = 0; j < x.size(); ++j)
        y[j] += (in_mask(mask, static_cast<int>(j)) ? -0.5 : 0.5) * I * a;
    return y;
}

inline PointTuple xi_vector(int n, unsigned mask, cplx a)
{
    PointTuple xi(n);
    for (int j = 0; j < n; ++j)
        xi[j] = (in_mask(mask, j) ? 0.5 : -0.5) * I * a;
    return xi;
}

inline cplx apply_h_s(int s, const Func& f, const PointTuple& x, const HOp& h)
{
    if (s < 1 || s > h.n)
        throw Error("H_s requires 1 <= s <= n");
    cplx acc = 0.0;
    for (unsigned m = 0; m < (1u << h.n); ++m)
        if (__builtin_popcount(m) == s)
            acc += h_coefficient(h, m, x) * f(shifted_full(x, m, h.a));
    return acc;
}

inline cplx apply_h_s(int s, const Func& f, const PointTuple& x, const SystemParams& p)
{
    return apply_h_s(s, f, x, HOp::standard(p));
}

inline cplx apply_h_J(unsigned mask, const Func& f, const PointTuple& x, const HOp& h)
{
    return h_coefficient(h, mask, x) * f(shifted_half(x, mask, h.a));
}

inline cplx apply_h_gen(double lam, const Func& f, const PointTuple& x, const HOp& h)
{
    cplx acc = 0.0;
    for (unsigned m = 0; m < (1u << h.n); ++m) {
        int sz = __builtin_popcount(m);
        acc += std::exp(2.0 * pi * h.a * lam * static_cast<double>(h.n - sz)) * apply_h_J(m, f, x, h);
    }
    return std::exp(-pi * static_cast<double>(h.n) * h.a * lam) * acc;
}

inline cplx apply_h_gen(double lam, const Func& f, const PointTuple& x, const SystemParams& p)
{
    return apply_h_gen(lam, f, x, HOp::standard(p));
}

// Generating function assembled from H_s with the inverse half total shift applied last.
inline cplx apply_h_gen_from_hs(double lam, const Func& f, const PointTuple& x, const HOp& h)
{
    PointTuple xs = x;
    for (auto& v : xs)
        v += 0.5 * I * h.a;
    cplx acc = f(xs) * std::exp(2.0 * pi * h.a * lam * static_cast<double>(h.n));
    for (int s = 1; s <= h.n; ++s)
        acc += std::exp(2.0 * pi * h.a * lam * static_cast<double>(h.n - s)) * apply_h_s(s, f, xs, h);
    return std::exp(-pi * static_cast<double>(h.n) * h.a * lam) * acc;
}

inline cplx elementary_symmetric(int s, const PointTuple& z)
{
    int n = static_cast<int>(z.size());
    if (s < 0 || s > n)
        throw Error("elementary symmetric index out of range");
    std::vector<cplx> e(n + 1, 0.0);
    e[0] = 1.0;
    for (int j = 0; j < n; ++j)
        for (int k = std::min(j + 1, s); k >= 1; --k)
            e[k] += e[k - 1] * z[j];
    return e[s];
}

inline cplx eigenvalue_gen(double lam, const RealTuple& lams, cplx a)
{
    cplx acc = 1.0;
    for (double lj : lams)
        acc *= 2.0 * std::cosh(pi * a * (lam - lj));
    return acc;
}

enum class EigenMode { plain, eta_conjugated };

struct EigenResidual {
    std::vector<double> per_s;
    std::vector<double> generating;
    double max() const
    {
        double m = 0.0;
        for (double v : per_s)
            m = std::max(m, v);
        for (double v : generating)
            m = std::max(m, v);
        return m;
    }
};

inline EigenResidual eigen_residual(const RealTuple& lams, const PointTuple& x, const SystemParams& p,
                                    EigenMode mode, const std::vector<double>& gen_lambdas,
                                    PsiOptions opt = {})
{
    EigenResidual out;
    double rg = p.g.real();
    if (mode == EigenMode::plain && !(rg < p.w.w2.real()))
        throw Error("eigenvalue equation outside proven region");
    if (mode == EigenMode::eta_conjugated && !(rg > p.w.w1.real()))
        throw Error("eigenvalue equation outside proven region");
    HOp h = HOp::standard(p);
    PointTuple z(lams.size());
    for (std::size_t j = 0; j < lams.size(); ++j)
        z[j] = std::exp(2.0 * pi * p.w.w1 * lams[j]);
    if (mode == EigenMode::plain) {
        WaveFunction wf(p, opt);
        Func psi_f = [&](const PointTuple& y) { return wf(lams, y); };
        cplx base = psi_f(x);
        for (int s = 1; s <= p.n; ++s)
            out.per_s.push_back(rel_diff(apply_h_s(s, psi_f, x, h), elementary_symmetric(s, z) * base));
        for (double l : gen_lambdas)
            out.generating.push_back(rel_diff(apply_h_gen(l, psi_f, x, h), eigenvalue_gen(l, lams, p.w.w1) * base));
        return out;
    }
    // eta(x) H(lambda) acting on Psi, with [eta Psi](y) = Psi(y; g*) / eta^(lambda).
    SystemParams ps = reflect_coupling(p);
    WaveFunction wf(p, opt), wfs(ps, opt);
    cplx eh = eta_hat(to_points(lams), p);
    Func eta_psi = [&](const PointTuple& y) { return wfs(lams, y) / eh; };
    cplx eta_x = eta(x, p);
    cplx rhs_base = eta_x * wf(lams, x);
    auto eta_h_j = [&](unsigned mask, bool half) {
        PointTuple y = half ? shifted_half(x, mask, h.a) : shifted_full(x, mask, h.a);
        return h_coefficient(h, mask, x) * eta_x / eta(y, p) * eta_psi(y);
    };
    for (int s = 1; s <= p.n; ++s) {
        cplx acc = 0.0;
        for (unsigned m = 0; m < (1u << p.n); ++m)
            if (__builtin_popcount(m) == s)
                acc += eta_h_j(m, false);
        out.per_s.push_back(rel_diff(acc, elementary_symmetric(s, z) * rhs_base));
    }
    for (double l : gen_lambdas) {
        cplx acc = 0.0;
        for (unsigned m = 0; m < (1u << p.n); ++m) {
            int sz = __builtin_popcount(m);
            acc += std::exp(2.0 * pi * h.a * l * static_cast<double>(p.n - sz)) * eta_h_j(m, true);
        }
        acc *= std::exp(-pi * static_cast<double>(p.n) * h.a * l);
        out.generating.push_back(rel_diff(acc, eigenvalue_gen(l, lams, p.w.w1) * rhs_base));
    }
    return out;
}

// |H_s H_t f - H_t H_s f| relative to the larger side.
inline double commute_residual(int s, int t, const Func& f, const PointTuple& x, const SystemParams& p)
{
    auto hs = [&](int k) { return [&, k](const PointTuple& y) { return apply_h_s(k, f, y, p); }; };
    cplx st = apply_h_s(s, hs(t), x, p);
    cplx ts = apply_h_s(t, hs(s), x, p);
    return std::abs(st - ts) / std::max({std::abs(st), std::abs(ts), 1e-300});
}

// eta H(lambda; g) eta^{-1} f against H(lambda; g*) f.
inline double similarity_residual(double lam, const Func& f, const PointTuple& x, const SystemParams& p)
{
    SystemParams ps = p.with_g(p.g_star());
    auto inner = [&](const PointTuple& y) { return f(y) / eta(y, p); };
    cplx lhs = eta(x, p) * apply_h_gen(lam, inner, x, p);
    cplx rhs = apply_h_gen(lam, f, x, ps);
    return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

enum class Weight { mu, delta };

// w(x) times c_J(sigma x) (or its conjugate) with the crossing sh denominators cancelled against w.
inline cplx weighted_coefficient(const PointTuple& x, unsigned mask, double sigma, bool conjugate,
                                 const HOp& h, const SystemParams& p, Weight weight)
{
    int n = p.n;
    cplx b = conjugate ? std::conj(h.b) : h.b;
    cplx gg = conjugate ? std::conj(h.g) : h.g;
    double tol = 1e-12 * std::abs(b);
    int match = std::abs(b - p.w.w2) < tol ? 2 : (std::abs(b - p.w.w1) < tol ? 1 : 0);
    cplx acc = 1.0 / factorial(n);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            cplx d = x[j] - x[k];
            bool crossing = in_mask(mask, j) != in_mask(mask, k);
            cplx f1 = std::sinh(pi * d / p.w.w1), f2 = std::sinh(pi * d / p.w.w2);
            if (crossing && match != 0) {
                // denominator sh(pi (y_j' - y_k') / b), j' in J, equals s * sh(pi d / b)
                double s = (in_mask(mask, j) ? 1.0 : -1.0) * sigma;
                acc *= 4.0 * (match == 2 ? f1 : f2) * s;
            } else {
                acc *= 4.0 * f1 * f2;
            }
        }
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (in_mask(mask, j) && !in_mask(mask, k)) {
                cplx d = sigma * (x[j] - x[k]);
                if (conjugate)
                    acc *= std::sinh(pi * (d + I * gg) / b);
                else
                    acc *= std::sinh(pi * (d - I * gg) / b);
                if (match == 0)
                    acc /= std::sinh(pi * d / b);
            }
    if (weight == Weight::mu)
        acc *= eta(x, p);
    return acc;
}

inline cplx weight_eta_factor(const PointTuple& x, const SystemParams& p, Weight weight)
{
    return weight == Weight::mu ? eta(x, p) : cplx(1.0);
}

inline cplx weight_value(const PointTuple& x, const SystemParams& p, Weight w)
{
    return w == Weight::mu ? mu_multi(x, p) : delta_measure(x, p);
}

inline QuadratureSpec pairing_spec(double radius, double rel_tol = 1e-9)
{
    QuadratureSpec s;
    s.rel_tol = rel_tol;
    s.abs_tol = 1e-13;
    s.truncation_radius = {radius};
    s.max_nodes_per_dim = 21 * 400;
    return s;
}

// Bilinear form; the delta weight carries eta on the first slot.
inline IntegralResult bilinear_pairing(const Func& f1, const Func& f2, Weight weight, const SystemParams& p,
                                       const QuadratureSpec& spec)
{
    auto integrand = [&](std::span<const double> t) {
        PointTuple x(t.begin(), t.end());
        cplx w = weight_value(x, p, weight);
        if (w == cplx(0.0))
            return cplx(0.0);
        if (weight == Weight::delta)
            w *= eta(x, p);
        return w * f1(negate(x)) * f2(x);
    };
    return integrate_box(integrand, static_cast<std::size_t>(p.n), spec);
}

inline IntegralResult sesquilinear_pairing(const Func& f1, const Func& f2, Weight weight, const SystemParams& p,
                                           const QuadratureSpec& spec, bool require_regime = true)
{
    if (require_regime) {
        auto r = classify_regime(p);
        bool ok = weight == Weight::mu ? r.spatial_mu() || r.tag == RegimeTag::III
                                       : r.tag != RegimeTag::None;
        if (!ok)
            throw Error("sesquilinear pairing requires a positive weight (unitarity regime)");
    }
    auto integrand = [&](std::span<const double> t) {
        PointTuple x(t.begin(), t.end());
        cplx w = weight_value(x, p, weight);
        if (w == cplx(0.0))
            return cplx(0.0);
        return w * std::conj(f1(x)) * f2(x);
    };
    return integrate_box(integrand, static_cast<std::size_t>(p.n), spec);
}

// (phi1, H phi2)_w and (H phi1, phi2)_w with cancelled coefficient singularities.
// The delta weight pairs eta phi1 against phi2, so both weights reduce to mu.
inline std::pair<IntegralResult, IntegralResult> bilinear_h_pairings(const Func& f1, const Func& f2, double lam,
                                                                     [[maybe_unused]] Weight weight, const SystemParams& p,
                                                                     const QuadratureSpec& spec)
{
    HOp h = HOp::standard(p);
    int n = p.n;
    auto pre = [&](unsigned m) {
        return std::exp(-pi * static_cast<double>(n) * h.a * lam) *
               std::exp(2.0 * pi * h.a * lam * static_cast<double>(n - __builtin_popcount(m)));
    };
    auto left = [&](std::span<const double> t) {
        PointTuple x(t.begin(), t.end());
        cplx acc = 0.0;
        for (unsigned m = 0; m < (1u << n); ++m)
            acc += pre(m) * weighted_coefficient(x, m, 1.0, false, h, p, Weight::delta) * f2(shifted_half(x, m, h.a));
        return eta(x, p) * f1(negate(x)) * acc;
    };
    auto right = [&](std::span<const double> t) {
        PointTuple x(t.begin(), t.end());
        PointTuple y = negate(x);
        cplx acc = 0.0;
        for (unsigned m = 0; m < (1u << n); ++m)
            acc += pre(m) * weighted_coefficient(x, m, -1.0, false, h, p, Weight::delta) * f1(shifted_half(y, m, h.a));
        return eta(x, p) * acc * f2(x);
    };
    return {integrate_box(left, n, spec), integrate_box(right, n, spec)};
}

// <phi1, H(l|w1,w2) phi2>_w and <H' phi1, phi2>_w where H' is H or its period-swapped partner.
inline std::pair<IntegralResult, IntegralResult> sesquilinear_h_pairings(const Func& f1, const Func& f2, double lam,
                                                                         Weight weight, const SystemParams& p,
                                                                         bool swap_on_right,
                                                                         const QuadratureSpec& spec)
{
    HOp h = HOp::standard(p);
    HOp hr = swap_on_right ? HOp::swapped(p) : h;
    int n = p.n;
    auto pre = [&](const HOp& op, unsigned m) {
        return std::exp(-pi * static_cast<double>(n) * op.a * lam) *
               std::exp(2.0 * pi * op.a * lam * static_cast<double>(n - __builtin_popcount(m)));
    };
    auto left = [&](std::span<const double> t) {
        PointTuple x(t.begin(), t.end());
        cplx acc = 0.0;
        for (unsigned m = 0; m < (1u << n); ++m)
            acc += pre(h, m) * weighted_coefficient(x, m, 1.0, false, h, p, Weight::delta) * f2(shifted_half(x, m, h.a));
        return weight_eta_factor(x, p, weight) * std::conj(f1(x)) * acc;
    };
    auto right = [&](std::span<const double> t) {
        PointTuple x(t.begin(), t.end());
        cplx acc = 0.0;
        for (unsigned m = 0; m < (1u << n); ++m)
            acc += std::conj(pre(hr, m)) * weighted_coefficient(x, m, 1.0, true, hr, p, Weight::delta) *
                   std::conj(f1(shifted_half(x, m, hr.a)));
        return weight_eta_factor(x, p, weight) * acc * f2(x);
    };
    return {integrate_box(left, n, spec), integrate_box(right, n, spec)};
}

inline double measure_shift_residual(const PointTuple& y, unsigned mask, const SystemParams& p, Weight weight)
{
    int n = p.n;
    cplx w1 = p.w.w1, w2 = p.w.w2;
    PointTuple yx = y;
    PointTuple xi = xi_vector(n, mask, w1);
    for (int j = 0; j < n; ++j)
        yx[j] += xi[j];
    cplx gr = weight == Weight::mu ? p.g : p.g_star();
    cplx lhs = weight_value(yx, p, weight), rhs = weight_value(y, p, weight);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (in_mask(mask, j) && !in_mask(mask, k)) {
                cplx d = y[j] - y[k];
                lhs *= std::sinh(pi * (d + I * w1 - I * p.g) / w2) / std::sinh(pi * (d + I * w1) / w2);
                rhs *= std::sinh(pi * (d + I * gr) / w2) / std::sinh(pi * d / w2);
            }
    return rel_diff(lhs, rhs);
}

inline double mu_shift_residual_scalar(cplx x, const SystemParams& p)
{
    cplx lhs = mu_scalar(x - I * p.w.w1, p) / mu_scalar(x, p);
    cplx rhs = std::sinh(pi * (x - I * p.g) / p.w.w2) / std::sinh(pi * x / p.w.w2);
    return rel_diff(lhs, rhs);
}

} // namespace rsr
