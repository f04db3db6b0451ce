#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "rsr/double_sine.hpp"
#include "rsr/types.hpp"

namespace rsr {

struct SystemParams {
    Periods w;
    cplx g{0.5, 0.0};
    int n = 1;

    SystemParams() = default;

    // Sorts periods so that Re w1 <= Re w2 unless sort is false.
    SystemParams(Periods periods, cplx coupling, int particles, bool sort = true)
        : w(periods), g(coupling), n(particles)
    {
        if (sort && w.w1.real() > w.w2.real())
            std::swap(w.w1, w.w2);
        validate();
    }

    cplx g_star() const { return w.sum() - g; }
    cplx p() const { return w.prod(); }

    void validate() const
    {
        if (!(w.w1.real() > 0.0) || !(w.w2.real() > 0.0))
            throw Error("invalid periods: requires Re w1 > 0 and Re w2 > 0");
        cplx s = w.sum();
        if (!(g.real() > 0.0) || !(g.real() < s.real()))
            throw Error("invalid coupling: requires 0 < Re g < Re(w1 + w2)");
        cplx gh = g / w.prod(), sh = s / w.prod();
        if (!(gh.real() > 0.0) || !(gh.real() < sh.real()))
            throw Error("invalid coupling: requires 0 < Re(g/w1w2) < Re((w1+w2)/w1w2)");
        if (n < 1)
            throw Error("particle number must be positive");
        if (n > 20)
            throw Error("particle number above 20 is not supported");
    }

    SystemParams with_n(int m) const
    {
        SystemParams q = *this;
        q.n = m;
        q.validate();
        return q;
    }

    SystemParams with_g(cplx h) const
    {
        SystemParams q = *this;
        q.g = h;
        q.validate();
        return q;
    }

    SystemParams swapped() const
    {
        SystemParams q = *this;
        std::swap(q.w.w1, q.w.w2);
        return q;
    }
};

inline SystemParams dual(const SystemParams& p)
{
    Periods wh(1.0 / p.w.w2, 1.0 / p.w.w1);
    return SystemParams(wh, p.g / p.w.prod(), p.n, false);
}

inline SystemParams reflect_coupling(const SystemParams& p)
{
    SystemParams q = p;
    q.g = p.g_star();
    return q;
}

// Parameters (w^, g^*) used for every hatted spectral-side object.
inline SystemParams hatted(const SystemParams& p)
{
    return reflect_coupling(dual(p));
}

inline double factorial(int n)
{
    if (n < 0 || n > 20)
        throw Error("factorial supported for 0 <= n <= 20");
    double f = 1.0;
    for (int k = 2; k <= n; ++k)
        f *= k;
    return f;
}

enum class RegimeTag { I, II, III, IV, None };

inline std::string to_string(RegimeTag t)
{
    switch (t) {
    case RegimeTag::I: return "I";
    case RegimeTag::II: return "II";
    case RegimeTag::III: return "III";
    case RegimeTag::IV: return "IV";
    default: return "None";
    }
}

struct Regime {
    RegimeTag tag = RegimeTag::None;
    std::vector<std::string> reasons;

    bool spatial_mu() const { return tag == RegimeTag::I || tag == RegimeTag::II; }
    bool spatial_delta() const { return tag == RegimeTag::III || tag == RegimeTag::IV; }
};

inline Regime classify_regime(const SystemParams& p, double tol = 1e-12)
{
    Regime r;
    bool real_w = std::abs(p.w.w1.imag()) <= tol && std::abs(p.w.w2.imag()) <= tol;
    bool conj_w = std::abs(std::conj(p.w.w1) - p.w.w2) <= tol;
    bool real_g = std::abs(p.g.imag()) <= tol;
    bool refl_g = std::abs(std::conj(p.g) - p.g_star()) <= tol;
    auto note = [&](bool c, const char* yes, const char* no) { r.reasons.push_back(c ? yes : no); };
    note(real_w, "periods real", "periods not real");
    note(conj_w, "periods complex conjugate", "periods not complex conjugate");
    note(real_g, "coupling real", "coupling not real");
    note(refl_g, "conj(g) = g*", "conj(g) != g*");
    if (real_w && real_g)
        r.tag = RegimeTag::I;
    else if (conj_w && real_g)
        r.tag = RegimeTag::II;
    else if (real_w && refl_g)
        r.tag = RegimeTag::III;
    else if (conj_w && refl_g)
        r.tag = RegimeTag::IV;
    return r;
}

} // namespace rsr
