#pragma once

#include <cmath>
#include <vector>

#include "rsr/double_sine.hpp"
#include "rsr/params.hpp"
#include "rsr/types.hpp"

namespace rsr {

inline cplx mu_scalar(cplx x, const SystemParams& p)
{
    auto num = s2_detailed(I * x, p.w);
    if (num.is_zero)
        return 0.0;
    auto den = s2_detailed(I * x + p.g, p.w);
    if (den.is_zero)
        throw PoleError({0, 0, LatticeKind::pole, x});
    return std::exp(num.log_value - den.log_value);
}

inline cplx kernel_k(cplx x, const SystemParams& p)
{
    cplx h = 0.5 * p.g_star();
    auto a = s2_detailed(I * x + h, p.w);
    auto b = s2_detailed(-I * x + h, p.w);
    if (a.is_zero || b.is_zero)
        throw PoleError({0, 0, LatticeKind::pole, x});
    return std::exp(-a.log_value - b.log_value);
}

inline void check_size(const PointTuple& x, const SystemParams& p)
{
    if (static_cast<int>(x.size()) != p.n)
        throw Error("tuple length does not match particle number");
}

inline cplx mu_multi(const PointTuple& x, const SystemParams& p)
{
    check_size(x, p);
    cplx acc = 1.0 / factorial(p.n);
    for (int j = 0; j < p.n; ++j)
        for (int k = 0; k < p.n; ++k)
            if (j != k) {
                acc *= mu_scalar(x[j] - x[k], p);
                if (acc == cplx(0.0, 0.0))
                    return 0.0;
            }
    return acc;
}

inline cplx mu_half(const PointTuple& x, const SystemParams& p)
{
    check_size(x, p);
    cplx acc = 1.0 / std::sqrt(factorial(p.n));
    for (int j = 0; j < p.n; ++j)
        for (int k = j + 1; k < p.n; ++k)
            acc *= mu_scalar(x[j] - x[k], p);
    return acc;
}

inline cplx delta_measure(const PointTuple& x, const SystemParams& p)
{
    check_size(x, p);
    cplx acc = 1.0 / factorial(p.n);
    for (int j = 0; j < p.n; ++j)
        for (int k = j + 1; k < p.n; ++k) {
            cplx d = x[j] - x[k];
            acc *= 4.0 * std::sinh(pi * d / p.w.w1) * std::sinh(pi * d / p.w.w2);
        }
    return acc;
}

// Product form (1/n!) prod_{j != k} S2(i(x_j - x_k)).
inline cplx delta_measure_s2(const PointTuple& x, const SystemParams& p)
{
    check_size(x, p);
    cplx acc = 1.0 / factorial(p.n);
    for (int j = 0; j < p.n; ++j)
        for (int k = 0; k < p.n; ++k)
            if (j != k)
                acc *= s2(I * (x[j] - x[k]), p.w);
    return acc;
}

inline cplx eta(const PointTuple& x, const SystemParams& p)
{
    check_size(x, p);
    cplx lg = 0.0;
    for (int j = 0; j < p.n; ++j)
        for (int k = 0; k < p.n; ++k)
            if (j != k) {
                auto v = s2_detailed(I * (x[j] - x[k]) + p.g, p.w);
                if (v.is_zero)
                    throw PoleError({0, 0, LatticeKind::pole, x[j] - x[k]});
                lg -= v.log_value;
            }
    return std::exp(lg);
}

inline cplx mu_hat(const PointTuple& lam, const SystemParams& p)
{
    return mu_multi(lam, hatted(p));
}

inline cplx mu_half_hat(const PointTuple& lam, const SystemParams& p)
{
    return mu_half(lam, hatted(p));
}

inline cplx eta_hat(const PointTuple& lam, const SystemParams& p)
{
    return eta(lam, hatted(p));
}

inline cplx delta_hat(const PointTuple& lam, const SystemParams& p)
{
    return delta_measure(lam, hatted(p));
}

inline cplx kernel_k_hat(cplx lam, const SystemParams& p)
{
    return kernel_k(lam, hatted(p));
}

// Normalisation d_{n-1} = [sqrt(w1 w2) S2(g)]^{1-n}.
inline cplx normalization_constant(const SystemParams& p)
{
    cplx base = std::sqrt(p.w.prod()) * s2(p.g, p.w);
    return std::pow(base, 1.0 - p.n);
}

} // namespace rsr
