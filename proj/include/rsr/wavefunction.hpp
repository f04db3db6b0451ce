#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "rsr/measures.hpp"
#include "rsr/params.hpp"
#include "rsr/types.hpp"

namespace rsr {

struct PsiOptions {
    double rel_tol = 1e-10;
    bool free_fast_path = true;
    int max_refinements = 3;
    double h = 0.0;
    double tail_margin = 3.0;
};

struct PsiResult {
    cplx value{};
    double error_estimate = 0.0;
    bool converged = true;
    double h = 0.0;
    long terms = 0;
};

inline std::vector<std::vector<int>> permutations(int n)
{
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do
        out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

inline int permutation_sign(const std::vector<int>& p)
{
    int s = 1;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            if (p[i] > p[j])
                s = -s;
    return s;
}

inline bool is_free_coupling(const SystemParams& p, double tol = 1e-12)
{
    return std::abs(p.g - p.w.w2) < tol || std::abs(p.g - p.w.w1) < tol;
}

// Closed form at g = w2 (or g = w1 by modular symmetry).
inline cplx psi_free(const RealTuple& lam, const PointTuple& x, const SystemParams& p)
{
    check_size(x, p);
    if (static_cast<int>(lam.size()) != p.n)
        throw Error("tuple length does not match particle number");
    cplx w1;
    if (std::abs(p.g - p.w.w2) < 1e-12)
        w1 = p.w.w1;
    else if (std::abs(p.g - p.w.w1) < 1e-12)
        w1 = p.w.w2;
    else
        throw Error("closed form requires g = w1 or g = w2");
    for (int j = 0; j < p.n; ++j)
        for (int k = j + 1; k < p.n; ++k)
            if (std::abs(lam[j] - lam[k]) < 1e-14 || std::abs(x[j] - x[k]) < 1e-14)
                throw Error("free-form singular; use psi");
    cplx pref = 1.0;
    for (int j = 0; j < p.n; ++j)
        for (int k = j + 1; k < p.n; ++k)
            pref /= 4.0 * I * std::sinh(pi * (x[j] - x[k]) / w1) * std::sinh(pi * w1 * (lam[j] - lam[k]));
    cplx sum = 0.0;
    for (const auto& s : permutations(p.n)) {
        cplx ph = 0.0;
        for (int j = 0; j < p.n; ++j)
            ph += lam[j] * x[s[j]];
        sum += static_cast<double>(permutation_sign(s)) * std::exp(2.0 * pi * I * ph);
    }
    return pref * sum;
}

// Evaluates the recursive integral representation on a uniform lattice hZ shared by all levels.
class WaveFunction {
public:
    explicit WaveFunction(SystemParams p, PsiOptions opt = {}) : p_(p), opt_(opt)
    {
        p_.validate();
        if (p_.n > 4)
            throw Error("wave function evaluation supports n <= 4");
        base_ = std::sqrt(p_.w.prod()) * s2(p_.g, p_.w);
        ghat_re_ = (p_.g / p_.w.prod()).real();
    }

    const SystemParams& params() const { return p_; }
    const PsiOptions& options() const { return opt_; }

    cplx operator()(const RealTuple& lam, const PointTuple& x) { return eval(lam, x).value; }

    PsiResult eval(const RealTuple& lam, const PointTuple& x)
    {
        check_size(x, p_);
        if (static_cast<int>(lam.size()) != p_.n)
            throw Error("tuple length does not match particle number");
        int n = p_.n;
        PsiResult res;
        if (n == 1) {
            res.value = std::exp(2.0 * pi * I * lam[0] * x[0]);
            return res;
        }
        cplx mean = std::accumulate(x.begin(), x.end(), cplx(0.0)) / static_cast<double>(n);
        PointTuple xc(n);
        double max_im = 0.0, max_re = 0.0;
        for (int j = 0; j < n; ++j) {
            xc[j] = x[j] - mean;
            max_im = std::max(max_im, std::abs(xc[j].imag()));
            max_re = std::max(max_re, std::abs(xc[j].real()));
        }
        double half_gs = 0.5 * p_.g_star().real();
        if (!(max_im < half_gs))
            throw Error("x outside strip |Im x_j| < Re g*/2");
        double lam_sum = std::accumulate(lam.begin(), lam.end(), 0.0);
        cplx phase = std::exp(2.0 * pi * I * mean * lam_sum);

        if (opt_.free_fast_path && is_free_coupling(p_)) {
            bool separated = true;
            for (int j = 0; j < n; ++j)
                for (int k = j + 1; k < n; ++k)
                    if (std::abs(lam[j] - lam[k]) < 1e-6 || std::abs(x[j] - x[k]) < 1e-6)
                        separated = false;
            if (separated) {
                res.value = psi_free(lam, x, p_);
                return res;
            }
        }

        double d = half_gs - max_im;
        if (n >= 3)
            d = std::min({d, p_.g.real(), half_gs});
        double spread = *std::max_element(lam.begin(), lam.end()) - *std::min_element(lam.begin(), lam.end());
        double lt = std::log(1.0 / opt_.rel_tol) + opt_.tail_margin;
        double h0 = opt_.h > 0.0 ? opt_.h : 2.0 * pi * d / (lt + 2.0 * pi * d * spread);
        int k = 0;
        if (opt_.h <= 0.0)
            while (ladder(k) > h0)
                ++k;
        for (int r = 0; r <= opt_.max_refinements; ++r) {
            double h = opt_.h > 0.0 ? opt_.h / std::pow(2.0, 0.5 * r) : ladder(k + r);
            auto out = top_level(lam, xc, h, max_re);
            out.value *= phase;
            out.error_estimate *= std::abs(phase);
            res = out;
            if (res.converged)
                break;
        }
        return res;
    }

private:
    struct Context {
        double h;
        RealTuple lam;
        std::unordered_map<long, cplx> kern, mu;
        std::map<std::vector<long>, cplx> psi;
        mutable std::shared_mutex mx;
    };

    static double ladder(int k) { return 0.5 * std::pow(2.0, -0.5 * k); }

    double tail() const
    {
        return (std::log(1.0 / opt_.rel_tol) + opt_.tail_margin) / (pi * ghat_re_);
    }

    Context& context(double h, const RealTuple& lam)
    {
        std::lock_guard lock(ctx_mx_);
        for (auto& c : ctx_)
            if (c->h == h && c->lam == lam)
                return *c;
        if (ctx_.size() > 16)
            ctx_.erase(ctx_.begin());
        ctx_.push_back(std::make_unique<Context>());
        ctx_.back()->h = h;
        ctx_.back()->lam = lam;
        return *ctx_.back();
    }

    template <class Map, class Fn>
    static cplx cached(Context& c, Map& m, const typename Map::key_type& key, Fn&& fn)
    {
        {
            std::shared_lock lock(c.mx);
            auto it = m.find(key);
            if (it != m.end())
                return it->second;
        }
        cplx v = fn();
        std::unique_lock lock(c.mx);
        m.emplace(key, v);
        return v;
    }

    cplx kern_lat(Context& c, long m)
    {
        long a = std::labs(m);
        return cached(c, c.kern, a, [&] { return kernel_k(c.h * static_cast<double>(a), p_); });
    }

    cplx mu_lat(Context& c, long m)
    {
        return cached(c, c.mu, m, [&] { return mu_scalar(c.h * static_cast<double>(m), p_); });
    }

    cplx norm(int m) const { return std::pow(base_, static_cast<double>(1 - m)); }

    // Psi for the first m spectral entries at lattice points h*k.
    cplx psi_lattice(Context& c, int m, std::vector<long> k)
    {
        if (m == 1)
            return std::exp(2.0 * pi * I * c.lam[0] * c.h * static_cast<double>(k[0]));
        std::sort(k.begin(), k.end());
        long t = k[0];
        for (auto& v : k)
            v -= t;
        double ls = 0.0;
        for (int j = 0; j < m; ++j)
            ls += c.lam[j];
        cplx shift = std::exp(2.0 * pi * I * ls * c.h * static_cast<double>(t));
        std::vector<long> key = k;
        key.insert(key.begin(), m);
        return shift * cached(c, c.psi, key, [&] { return psi_sum(c, m, k); });
    }

    template <class KernelAt>
    void enumerate(Context& c, int m, long lo, long hi, KernelAt&& kern_at, cplx& full, cplx& coarse,
                   double& mass, long& terms)
    {
        int dim = m - 1;
        double h = c.h;
        double lam_m = c.lam[m - 1];
        std::vector<long> z(dim);
        double weight = factorial(dim);
        auto visit = [&](auto&& self, int idx, long start) -> void {
            if (idx == dim) {
                cplx mu = 1.0 / factorial(dim);
                for (int a = 0; a < dim; ++a)
                    for (int b = 0; b < dim; ++b)
                        if (a != b)
                            mu *= mu_lat(c, z[a] - z[b]);
                cplx kp = kern_at(z);
                double zs = 0.0;
                for (long v : z)
                    zs += static_cast<double>(v);
                cplx term = weight * mu * kp * std::exp(-2.0 * pi * I * lam_m * h * zs);
                if (dim >= 1 && term != cplx(0.0))
                    term *= psi_lattice(c, dim, z);
                full += term;
                bool even = std::all_of(z.begin(), z.end(), [](long v) { return v % 2 == 0; });
                if (even)
                    coarse += term;
                mass += std::abs(term);
                ++terms;
                return;
            }
            for (long v = start; v <= hi; ++v) {
                z[idx] = v;
                self(self, idx + 1, v + 1);
            }
        };
        visit(visit, 0, lo);
    }

    cplx psi_sum(Context& c, int m, const std::vector<long>& k)
    {
        double h = c.h;
        long kmin = k.front(), kmax = k.back();
        double centre = 0.5 * static_cast<double>(kmin + kmax);
        double rad = 0.5 * static_cast<double>(kmax - kmin) + tail() / h;
        long lo = static_cast<long>(std::floor(centre - rad)), hi = static_cast<long>(std::ceil(centre + rad));
        auto kern_at = [&](const std::vector<long>& z) {
            cplx acc = 1.0;
            for (long kj : k)
                for (long zv : z)
                    acc *= kern_lat(c, kj - zv);
            return acc;
        };
        cplx full = 0.0, coarse = 0.0;
        double mass = 0.0;
        long terms = 0;
        enumerate(c, m, lo, hi, kern_at, full, coarse, mass, terms);
        double ks = 0.0;
        for (long v : k)
            ks += static_cast<double>(v);
        cplx outer = std::exp(2.0 * pi * I * c.lam[m - 1] * h * ks);
        return norm(m) * std::pow(h, m - 1) * outer * full;
    }

    PsiResult top_level(const RealTuple& lam, const PointTuple& xc, double h, double max_re)
    {
        int n = p_.n;
        Context& c = context(h, lam);
        long hi = static_cast<long>(std::ceil((max_re + tail()) / h));
        long lo = -hi;
        std::vector<std::vector<cplx>> kx(n, std::vector<cplx>(hi - lo + 1));
        for (int j = 0; j < n; ++j)
            for (long v = lo; v <= hi; ++v)
                kx[j][v - lo] = kernel_k(xc[j] - h * static_cast<double>(v), p_);
        auto kern_at = [&](const std::vector<long>& z) {
            cplx acc = 1.0;
            for (int j = 0; j < n; ++j)
                for (long zv : z)
                    acc *= kx[j][zv - lo];
            return acc;
        };
        cplx full = 0.0, coarse = 0.0;
        double mass = 0.0;
        long terms = 0;
        enumerate(c, n, lo, hi, kern_at, full, coarse, mass, terms);
        cplx xs = std::accumulate(xc.begin(), xc.end(), cplx(0.0));
        cplx pref = norm(n) * std::pow(h, n - 1) * std::exp(2.0 * pi * I * lam[n - 1] * xs);
        PsiResult r;
        r.h = h;
        r.terms = terms;
        r.value = pref * full;
        cplx coarse_val = pref * coarse * std::pow(2.0, n - 1);
        double scale = std::abs(pref) * mass;
        double diff = std::abs(r.value - coarse_val);
        r.error_estimate = (scale > 0.0 ? diff * diff / scale : 0.0) + 1e-15 * scale;
        r.converged = r.error_estimate <= std::max(1e-300, opt_.rel_tol * std::abs(r.value));
        return r;
    }

    SystemParams p_;
    PsiOptions opt_;
    cplx base_;
    double ghat_re_;
    std::mutex ctx_mx_;
    std::vector<std::unique_ptr<Context>> ctx_;
};

inline cplx psi(const RealTuple& lam, const PointTuple& x, const SystemParams& p, PsiOptions opt = {})
{
    WaveFunction wf(p, opt);
    return wf(lam, x);
}

enum class SymmetryKind { bispectral, coupling_reflection, modular, parity, shift, permutation };

inline SymmetryKind parse_symmetry(const std::string& s)
{
    if (s == "bispectral") return SymmetryKind::bispectral;
    if (s == "coupling-reflection") return SymmetryKind::coupling_reflection;
    if (s == "modular") return SymmetryKind::modular;
    if (s == "parity") return SymmetryKind::parity;
    if (s == "shift") return SymmetryKind::shift;
    if (s == "permutation") return SymmetryKind::permutation;
    throw Error("unknown symmetry kind: " + s);
}

inline std::vector<std::string> symmetry_names()
{
    return {"bispectral", "coupling-reflection", "modular", "parity", "shift", "permutation"};
}

inline double symmetry_residual(SymmetryKind kind, const RealTuple& lam, const PointTuple& x, const SystemParams& p,
                                PsiOptions opt = {}, double alpha = 0.4)
{
    WaveFunction wf(p, opt);
    int n = p.n;
    switch (kind) {
    case SymmetryKind::bispectral: {
        WaveFunction dual_wf(hatted(p), opt);
        return rel_diff(wf(lam, x), dual_wf(real_part(x), to_points(lam)));
    }
    case SymmetryKind::coupling_reflection: {
        WaveFunction refl(reflect_coupling(p), opt);
        cplx rhs = eta(x, p) * eta_hat(to_points(lam), p) * wf(lam, x);
        return rel_diff(refl(lam, x), rhs);
    }
    case SymmetryKind::modular: {
        WaveFunction sw(p.swapped(), opt);
        return rel_diff(wf(lam, x), sw(lam, x));
    }
    case SymmetryKind::parity: {
        RealTuple ml(lam);
        for (auto& v : ml)
            v = -v;
        return rel_diff(wf(lam, x), wf(ml, negate(x)));
    }
    case SymmetryKind::shift: {
        RealTuple sl(lam);
        for (auto& v : sl)
            v += alpha;
        cplx xs = std::accumulate(x.begin(), x.end(), cplx(0.0));
        return rel_diff(wf(sl, x), std::exp(2.0 * pi * I * alpha * xs) * wf(lam, x));
    }
    case SymmetryKind::permutation: {
        cplx base = wf(lam, x);
        double worst = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                RealTuple sl(lam);
                PointTuple sx(x);
                std::swap(sl[j], sl[k]);
                std::swap(sx[j], sx[k]);
                worst = std::max({worst, rel_diff(base, wf(sl, x)), rel_diff(base, wf(lam, sx))});
            }
        return worst;
    }
    }
    return 0.0;
}

// Phi_lambda(x) = sqrt(w(x) w^(lambda/p) / p^n) Psi_{lambda/p}(x), p = w1 w2.
inline cplx psi_rescaled(const RealTuple& lam, const PointTuple& x, const SystemParams& p, PsiOptions opt = {})
{
    auto r = classify_regime(p);
    if (r.tag == RegimeTag::None)
        throw Error("rescaled wave function requires a unitarity regime");
    cplx pp = p.w.prod();
    RealTuple ls(lam);
    for (auto& v : ls)
        v /= pp.real();
    bool mu_w = r.spatial_mu();
    cplx wx = mu_w ? mu_multi(x, p) : delta_measure(x, p);
    cplx wl = mu_w ? mu_hat(to_points(ls), p) : delta_hat(to_points(ls), p);
    double mag = std::max(0.0, (wx * wl).real()) / std::pow(pp.real(), p.n);
    WaveFunction wf(p, opt);
    return std::sqrt(mag) * wf(ls, x);
}

inline double psi_envelope(const RealTuple& lam, const PointTuple& x, const SystemParams& p, double delta, double c,
                           bool use_min_lambda = true)
{
    int n = p.n;
    double ln = use_min_lambda ? *std::min_element(lam.begin(), lam.end()) : lam[n - 1];
    double gh = (p.g / p.w.prod()).real();
    double im = 0.0, re = 0.0, pair = 0.0;
    for (int j = 0; j < n; ++j) {
        im += x[j].imag();
        re += std::abs(x[j].real());
        for (int k = j + 1; k < n; ++k)
            pair += std::abs((x[j] - x[k]).real());
    }
    return c * std::exp(-2.0 * pi * ln * im + delta * re - pi * gh * pair);
}

} // namespace rsr
