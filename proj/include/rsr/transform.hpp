#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rsr/hamiltonian.hpp"
#include "rsr/measures.hpp"
#include "rsr/parallel.hpp"
#include "rsr/params.hpp"
#include "rsr/quadrature.hpp"
#include "rsr/types.hpp"

namespace rsr {

using SpecFunc = std::function<cplx(const RealTuple&)>;

enum class Provenance { direct, grid };

struct SpectralFunction {
    SpecFunc eval;
    Provenance provenance = Provenance::direct;
    cplx operator()(const RealTuple& lam) const { return eval(lam); }
};

struct TransformSpec {
    double rel_tol = 1e-11;
    double abs_tol = 1e-15;
    double grid_spacing = 0.05;
    double psi_tol = 1e-11;
    double image_tol = 1e-9;
    double ell_cap = 14.0;
    double lambda_cap = 24.0;
};

struct TransformValue {
    cplx value{};
    double error_estimate = 0.0;
    bool converged = true;
    std::string warning;
};

struct RegularizerParams {
    double lambda_reg = 2.0;
    double eps = 0.1;

    void validate(const SystemParams& p) const
    {
        if (!(lambda_reg > 0.0))
            throw Error("regularizer requires lambda_reg > 0");
        if (!(eps >= 0.0) || !(eps <= 0.5 * p.g_star().real()))
            throw Error("regularizer requires 0 <= eps <= Re g*/2");
    }
};

inline cplx regularizer_r(const RegularizerParams& reg, const RealTuple& lam, const SystemParams& p)
{
    reg.validate(p);
    SystemParams hp = hatted(p);
    double s = static_cast<double>(lam.size()) * reg.lambda_reg - std::accumulate(lam.begin(), lam.end(), 0.0);
    cplx acc = std::exp(pi * (p.g_star() - 2.0 * reg.eps) * s);
    for (double l : lam)
        acc *= kernel_k(reg.lambda_reg - l, hp);
    return acc;
}

// Radius beyond which |f| stays below tol times its running peak.
inline double observed_radius(const std::function<double(double)>& mag, double tol, double step = 0.5,
                              double cap = 60.0)
{
    double peak = mag(0.0), r = 0.0;
    int quiet = 0;
    while (r < cap) {
        r += step;
        double m = std::max(mag(r), mag(-r));
        peak = std::max(peak, m);
        quiet = m < tol * peak ? quiet + 1 : 0;
        if (quiet >= 3)
            return r;
    }
    return cap;
}

namespace detail {

inline PointTuple one(double x) { return PointTuple{cplx(x, 0.0)}; }

inline IntegralResult line_integral(const std::function<cplx(double)>& f, double a, double b, double rel,
                                    double abs, double panel = 1.0)
{
    int panels = std::max(1, static_cast<int>(std::ceil((b - a) / panel)));
    return integrate_interval(f, a, b, rel, abs, 20000, panels);
}

} // namespace detail

// ---------- one particle: T is the Fourier transform ----------

inline TransformValue forward_t_n1(const Func& phi, double radius, double lam, const TransformSpec& spec = {})
{
    auto f = [&](double x) { return std::exp(-2.0 * pi * I * lam * x) * phi(detail::one(x)); };
    double panel = std::min(1.0, 1.0 / (std::abs(lam) + 1e-9));
    auto r = detail::line_integral(f, -radius, radius, spec.rel_tol, spec.abs_tol, std::max(panel, 0.05));
    return {r.value, r.error_estimate, r.converged, {}};
}

inline TransformValue inverse_t_n1(const SpecFunc& chi, double radius, double x, const TransformSpec& spec = {})
{
    auto f = [&](double l) { return std::exp(2.0 * pi * I * l * x) * chi(RealTuple{l}); };
    double panel = std::min(1.0, 1.0 / (std::abs(x) + 1e-9));
    auto r = detail::line_integral(f, -radius, radius, spec.rel_tol, spec.abs_tol, std::max(panel, 0.05));
    return {r.value, r.error_estimate, r.converged, {}};
}

// ---------- two particles: centre-of-mass reduction ----------
//
// With X = (x1+x2)/2, u = x1-x2, L = l1+l2, l = l1-l2:
//   Psi_lambda(x) = exp(2 pi i X L) psi_r(l, u),
//   psi_r(l, u) = d1 int dy exp(2 pi i l y) K(u/2 - y) K(u/2 + y).
// The y-line is shifted to Im y = theta sign(l), which keeps the exponentially small values above roundoff.

class TwoBody {
public:
    explicit TwoBody(const SystemParams& p, double tol = 1e-11) : p_(p), tol_(tol)
    {
        if (p.n != 2)
            throw Error("two-body reduction requires n = 2");
        d_ = 0.5 * p.g_star().real();
        rate_ = pi * (p.g / p.w.prod()).real();
        L_ = std::log(1.0 / tol) + 2.0;
        double du = std::min({p.g.real(), p.g_star().real(), p.w.w1.real(), p.w.w2.real()});
        h0_ = std::min(pi * d_ / L_, pi * du / L_);
        tail_ = L_ / (2.0 * rate_) + 1.0;
        d1_ = 1.0 / (std::sqrt(p.w.prod()) * s2(p.g, p.w));
        round_ = std::log(tol / 2.2e-16);
    }

    const SystemParams& params() const { return p_; }
    double h0() const { return h0_; }
    double u_step() const { return 2.0 * h0_; }

    int band(double ell) const
    {
        double a = std::abs(ell);
        for (int b = 0; b <= 14; ++b) {
            double s = s_of(b);
            if (s > 0.5 * d_ + 1e-15)
                continue;
            if (2.0 * pi * a * s <= round_ && 2.0 * L_ * (d_ - s) / s >= 4.0 * pi * d_ * a)
                return b;
        }
        throw Error("spectral argument too large for reduced lattice");
    }

    cplx kern(cplx z)
    {
        std::pair<long long, long long> key{std::llround(z.real() * 1e12), std::llround(z.imag() * 1e12)};
        {
            std::lock_guard lock(kmx_);
            auto it = kcache_.find(key);
            if (it != kcache_.end())
                return it->second;
        }
        cplx v = kernel_k(z, p_);
        std::lock_guard lock(kmx_);
        kcache_.emplace(key, v);
        return v;
    }

    // psi_r at one real spatial difference u for many spectral differences.
    std::vector<cplx> at_u(double u, const std::vector<double>& ells, std::vector<double>* err = nullptr)
    {
        std::vector<cplx> out(ells.size());
        if (err)
            err->assign(ells.size(), 0.0);
        std::map<int, std::vector<std::size_t>> by_band;
        for (std::size_t i = 0; i < ells.size(); ++i)
            by_band[band(ells[i])].push_back(i);
        for (const auto& [b, idx] : by_band) {
            const auto& prod = product_table(u, b);
            long J = (static_cast<long>(prod.size()) - 1) / 2;
            double h = h_of(b), th = d_ - s_of(b);
            for (std::size_t i : idx) {
                double a = std::abs(ells[i]);
                auto [v, e] = lattice_sum(prod, J, 0, a, h, th);
                out[i] = v;
                if (err)
                    (*err)[i] = e;
            }
        }
        return out;
    }

    // rows[i][k] = psi_r(ells[i], k * u_step()), k = 0..kmax.
    std::vector<std::vector<cplx>> on_grid(int kmax, const std::vector<double>& ells,
                                           std::vector<std::vector<double>>* err = nullptr)
    {
        std::vector<std::vector<cplx>> rows(ells.size(), std::vector<cplx>(kmax + 1));
        if (err)
            err->assign(ells.size(), std::vector<double>(kmax + 1, 0.0));
        std::map<int, std::vector<std::size_t>> by_band;
        for (std::size_t i = 0; i < ells.size(); ++i)
            by_band[band(ells[i])].push_back(i);
        for (const auto& [b, idx] : by_band) {
            long stride = 1L << b;
            double h = h_of(b), th = d_ - s_of(b);
            long J = static_cast<long>(std::ceil(tail_ / h));
            long M = 2 * stride * kmax + J;
            const auto& T = grid_table(b, M);
            std::vector<cplx> prod;
            for (int k = 0; k <= kmax; ++k) {
                long c = stride * k, jm = c + J;
                prod.assign(2 * jm + 1, 0.0);
                for (long j = -jm; j <= jm; ++j)
                    prod[j + jm] = T[c - j + M] * T[-c - j + M];
                for (std::size_t i : idx) {
                    auto [v, e] = lattice_sum(prod, jm, 0, std::abs(ells[i]), h, th);
                    rows[i][k] = v;
                    if (err)
                        (*err)[i][k] = e;
                }
            }
        }
        return rows;
    }

    cplx psi(const RealTuple& lam, const RealTuple& x)
    {
        double L = lam[0] + lam[1], l = lam[0] - lam[1];
        double X = 0.5 * (x[0] + x[1]), u = x[0] - x[1];
        return std::exp(2.0 * pi * I * X * L) * at_u(u, {l})[0];
    }

    static PointTuple pair(double c, double diff) { return {cplx(c + 0.5 * diff), cplx(c - 0.5 * diff)}; }

    cplx mu_r(double u) { return mu_multi(pair(0.0, u), p_); }
    cplx delta_r(double u) { return delta_measure(pair(0.0, u), p_); }
    cplx mu_hat_r(double l) { return mu_hat(pair(0.0, l), p_); }
    cplx delta_hat_r(double l) { return delta_hat(pair(0.0, l), p_); }
    cplx eta_hat_r(double l) { return eta_hat(pair(0.0, l), p_); }

private:
    double s_of(int b) const { return d_ / std::pow(2.0, b + 1); }
    double h_of(int b) const { return h0_ / std::pow(2.0, b); }

    std::pair<cplx, double> lattice_sum(const std::vector<cplx>& prod, long jm, long, double a, double h,
                                        double th) const
    {
        cplx full = 0.0, coarse = 0.0;
        double mass = 0.0;
        for (long j = -jm; j <= jm; ++j) {
            cplx t = std::exp(2.0 * pi * I * a * h * static_cast<double>(j)) * prod[j + jm];
            full += t;
            if (j % 2 == 0)
                coarse += t;
            mass += std::abs(prod[j + jm]);
        }
        cplx pref = d1_ * h * std::exp(-2.0 * pi * a * th);
        cplx v = pref * full, vc = pref * 2.0 * coarse;
        double scale = std::abs(pref) * mass;
        double diff = std::abs(v - vc);
        double e = (scale > 0.0 ? diff * diff / scale : 0.0) + 1e-15 * scale;
        return {v, e};
    }

    const std::vector<cplx>& product_table(double u, int b)
    {
        auto key = std::make_pair(std::llround(u * 1e12), b);
        {
            std::lock_guard lock(tmx_);
            auto it = ptables_.find(key);
            if (it != ptables_.end())
                return it->second;
        }
        double h = h_of(b), th = d_ - s_of(b);
        long J = static_cast<long>(std::ceil((0.5 * std::abs(u) + tail_) / h));
        std::vector<cplx> prod(2 * J + 1);
        parallel_for(prod.size(), [&](std::size_t i) {
            double y = h * (static_cast<double>(i) - static_cast<double>(J));
            prod[i] = kern(cplx(0.5 * u - y, -th)) * kern(cplx(0.5 * u + y, th));
        });
        std::lock_guard lock(tmx_);
        return ptables_.emplace(key, std::move(prod)).first->second;
    }

    // T[m + M] = K(h m - i theta), m in [-M, M].
    const std::vector<cplx>& grid_table(int b, long M)
    {
        {
            std::lock_guard lock(tmx_);
            auto it = gtables_.find(b);
            if (it != gtables_.end() && static_cast<long>(it->second.size()) >= 2 * M + 1) {
                if (static_cast<long>(it->second.size()) == 2 * M + 1)
                    return it->second;
            }
        }
        double h = h_of(b), th = d_ - s_of(b);
        std::vector<cplx> T(2 * M + 1);
        parallel_for(T.size(), [&](std::size_t i) {
            T[i] = kern(cplx(h * (static_cast<double>(i) - static_cast<double>(M)), -th));
        });
        std::lock_guard lock(tmx_);
        gtables_[b] = std::move(T);
        return gtables_[b];
    }

    SystemParams p_;
    double tol_, d_, rate_, L_, h0_, tail_, round_;
    cplx d1_;
    std::mutex kmx_, tmx_;
    std::map<std::pair<long long, long long>, cplx> kcache_;
    std::map<std::pair<long long, int>, std::vector<cplx>> ptables_;
    std::map<int, std::vector<cplx>> gtables_;
};

// Spectral image on the (L, l) grid; l >= 0 stored, mirrored by permutation symmetry.
struct ImageGrid {
    double delta = 0.05;
    int lam_n = 0;
    int ell_n = 0;
    std::vector<cplx> v;
    std::vector<double> err;

    cplx at(int i, int j) const
    {
        j = std::abs(j);
        if (i < -lam_n || i > lam_n || j > ell_n)
            return 0.0;
        return v[static_cast<std::size_t>(i + lam_n) * (ell_n + 1) + j];
    }
    double error_at(int i, int j) const
    {
        j = std::abs(j);
        if (i < -lam_n || i > lam_n || j > ell_n)
            return 0.0;
        return err[static_cast<std::size_t>(i + lam_n) * (ell_n + 1) + j];
    }
    double Lambda(int i) const { return delta * i; }
    double ell(int j) const { return delta * j; }
    RealTuple lambda_tuple(int i, int j) const { return {0.5 * (Lambda(i) + ell(j)), 0.5 * (Lambda(i) - ell(j))}; }
};

enum class ImageKind { t_transform, u_transform };

namespace detail {

// phi~(L, u) = int dX exp(-2 pi i X L) phi(X + u/2, X - u/2).
inline cplx reduced_fourier(const Func& phi, double radius, double L, double u, double rel)
{
    auto f = [&](double X) {
        return std::exp(-2.0 * pi * I * X * L) * phi(TwoBody::pair(X, u));
    };
    double panel = std::max(0.1, std::min(1.0, 1.0 / (std::abs(L) + 1e-9)));
    return line_integral(f, -radius, radius, rel, 1e-300, panel).value;
}

} // namespace detail

// Grid image of T at n = 2, truncated by observed decay. For the U kind the image is of sqrt(w) phi.
inline ImageGrid image_n2(const AnalyticTestFunction& phi, TwoBody& tb, const TransformSpec& spec,
                          ImageKind kind = ImageKind::t_transform)
{
    const SystemParams& p = tb.params();
    auto regime = classify_regime(p);
    bool u_kind = kind == ImageKind::u_transform;
    if (u_kind && regime.tag == RegimeTag::None)
        throw Error("rescaled transform requires a unitarity regime");
    double pp = p.w.prod().real();
    double scale = u_kind ? 1.0 / pp : 1.0;
    Func f = phi.as_func();
    double R = phi.truncation_radius(1e-16);
    double H = tb.u_step();
    int kmax = static_cast<int>(std::ceil(2.0 * R / H)) + 1;
    std::vector<double> us(kmax + 1);
    for (int k = 0; k <= kmax; ++k)
        us[k] = H * k;

    // spatial weights on the u lattice
    std::vector<cplx> wu(kmax + 1);
    bool mu_w = !u_kind || regime.spatial_mu();
    parallel_for(wu.size(), [&](std::size_t k) {
        wu[k] = mu_w ? tb.mu_r(us[k]) : tb.delta_r(us[k]);
    });

    auto phit_row = [&](int i) {
        std::vector<cplx> row(kmax + 1);
        double L = spec.grid_spacing * i * scale;
        parallel_for(row.size(), [&](std::size_t k) { row[k] = detail::reduced_fourier(f, R, L, us[k], 1e-13); });
        return row;
    };

    auto psi0 = tb.on_grid(kmax, {0.0});
    std::vector<double> wmag(kmax + 1);
    for (int k = 0; k <= kmax; ++k)
        wmag[k] = std::abs(wu[k] * psi0[0][k]);

    // Lambda range from the decay of phi~
    std::map<int, std::vector<cplx>> phit;
    auto row_mag = [&](int i) {
        if (!phit.count(i))
            phit[i] = phit_row(i);
        double s = 0.0;
        for (int k = 0; k <= kmax; ++k)
            s += wmag[k] * std::abs(phit[i][k]);
        return s;
    };
    double peak = row_mag(0);
    int lam_n = 0;
    int quiet = 0;
    int cap = static_cast<int>(spec.lambda_cap / spec.grid_spacing);
    while (lam_n < cap) {
        ++lam_n;
        double m = std::max(row_mag(lam_n), row_mag(-lam_n));
        peak = std::max(peak, m);
        quiet = m < spec.image_tol * peak ? quiet + 1 : 0;
        if (quiet >= 4)
            break;
    }

    ImageGrid img;
    img.delta = spec.grid_spacing;
    img.lam_n = lam_n;
    std::vector<std::vector<cplx>> cols;  // per l row: values over Lambda
    std::vector<std::vector<double>> cerr;
    double wpeak = 0.0;
    int block = 10, j0 = 0;
    int jcap = static_cast<int>(spec.ell_cap / spec.grid_spacing);
    int quiet_rows = 0;
    while (j0 <= jcap) {
        std::vector<double> ells;
        for (int j = j0; j < j0 + block; ++j)
            ells.push_back(spec.grid_spacing * j * scale);
        std::vector<std::vector<double>> perr;
        auto P = tb.on_grid(kmax, ells, &perr);
        for (std::size_t r = 0; r < ells.size(); ++r) {
            int j = j0 + static_cast<int>(r);
            std::vector<cplx> col(2 * lam_n + 1);
            std::vector<double> ce(2 * lam_n + 1);
            double lr = spec.grid_spacing * j;
            cplx pre = 1.0;
            if (u_kind) {
                double lh = lr * scale;
                cplx wh = mu_w ? tb.mu_hat_r(lh) : tb.delta_hat_r(lh);
                pre = std::sqrt(std::max(0.0, wh.real())) / pp;
            }
            double wl = u_kind ? 1.0 : std::abs(mu_half(TwoBody::pair(0.0, lr), hatted(p)));
            double rmax = 0.0;
            for (int i = -lam_n; i <= lam_n; ++i) {
                const auto& ph = phit[i];
                cplx fine = 0.0, coarse = 0.0;
                double e_psi = 0.0, mass = 0.0;
                for (int k = 0; k <= kmax; ++k) {
                    cplx t = wu[k] * (u_kind ? std::conj(P[r][k]) : P[r][k]) * ph[k];
                    double c = k == 0 ? 1.0 : 2.0;
                    fine += c * t;
                    if (k % 2 == 0)
                        coarse += c * t;
                    e_psi += c * std::abs(wu[k] * ph[k]) * perr[r][k];
                    mass += c * std::abs(t);
                }
                cplx val = pre * H * fine;
                double diff = std::abs(pre) * H * std::abs(fine - 2.0 * coarse);
                double sc = std::abs(pre) * H * mass;
                ce[i + lam_n] = (sc > 0.0 ? diff * diff / sc : 0.0) + std::abs(pre) * H * e_psi;
                col[i + lam_n] = val;
                rmax = std::max(rmax, wl * std::abs(val));
            }
            cols.push_back(std::move(col));
            cerr.push_back(std::move(ce));
            wpeak = std::max(wpeak, rmax);
            quiet_rows = rmax < spec.image_tol * wpeak ? quiet_rows + 1 : 0;
        }
        j0 += block;
        if (quiet_rows >= block)
            break;
    }
    img.ell_n = static_cast<int>(cols.size()) - 1;
    img.v.assign(static_cast<std::size_t>(2 * lam_n + 1) * (img.ell_n + 1), 0.0);
    img.err.assign(img.v.size(), 0.0);
    for (int i = -lam_n; i <= lam_n; ++i)
        for (int j = 0; j <= img.ell_n; ++j) {
            img.v[static_cast<std::size_t>(i + lam_n) * (img.ell_n + 1) + j] = cols[j][i + lam_n];
            img.err[static_cast<std::size_t>(i + lam_n) * (img.ell_n + 1) + j] = cerr[j][i + lam_n];
        }
    return img;
}

namespace detail {

// Trapezoid sum over the (L, l) grid with l mirrored; returns fine and coarse (2 delta) sums.
template <class Cell>
std::pair<cplx, cplx> grid_sum(const ImageGrid& img, Cell&& cell, double& mass)
{
    cplx fine = 0.0, coarse = 0.0;
    mass = 0.0;
    double w = img.delta * img.delta / 2.0;
    for (int j = -img.ell_n; j <= img.ell_n; ++j)
        for (int i = -img.lam_n; i <= img.lam_n; ++i) {
            cplx t = cell(i, j);
            fine += t;
            mass += std::abs(t);
            if (i % 2 == 0 && j % 2 == 0)
                coarse += t;
        }
    return {w * fine, 4.0 * w * coarse};
}

inline TransformValue finish(cplx fine, cplx coarse, double mass, double delta, double extra)
{
    TransformValue r;
    r.value = fine;
    double diff = std::abs(fine - coarse);
    double scale = mass * delta * delta / 2.0;
    r.error_estimate = (scale > 0.0 ? diff * diff / scale : 0.0) + extra;
    return r;
}

} // namespace detail

// [T^dagger chi](x) at n = 2 from a grid image.
inline TransformValue inverse_from_image(const ImageGrid& img, const RealTuple& x, TwoBody& tb)
{
    double X = 0.5 * (x[0] + x[1]), u = x[0] - x[1];
    std::vector<double> ells(img.ell_n + 1);
    for (int j = 0; j <= img.ell_n; ++j)
        ells[j] = img.ell(j);
    std::vector<double> perr;
    auto psi = tb.at_u(u, ells, &perr);
    std::vector<cplx> mh(img.ell_n + 1);
    parallel_for(mh.size(), [&](std::size_t j) { mh[j] = tb.mu_hat_r(ells[j]); });
    double extra = 0.0;
    auto cell = [&](int i, int j) {
        int a = std::abs(j);
        cplx t = mh[a] * std::exp(2.0 * pi * I * X * img.Lambda(i)) * psi[a];
        extra += img.delta * img.delta / 2.0 *
                 (std::abs(t) * img.error_at(i, j) + std::abs(mh[a] * img.at(i, j)) * perr[a]);
        return t * img.at(i, j);
    };
    double mass;
    auto [fine, coarse] = detail::grid_sum(img, cell, mass);
    return detail::finish(fine, coarse, mass, img.delta, extra);
}

inline double pairing_radius(const AnalyticTestFunction& a, const AnalyticTestFunction& b, double tol)
{
    return std::max(a.truncation_radius(tol), b.truncation_radius(tol));
}

// ---------- public transform operations ----------

// [T f](lambda) for a symmetric f supported within radius.
inline TransformValue forward_t_func(const Func& f, double radius, const RealTuple& lam, const SystemParams& p,
                                     const TransformSpec& spec = {})
{
    if (static_cast<int>(lam.size()) != p.n)
        throw Error("tuple length does not match particle number");
    if (p.n == 1)
        return forward_t_n1(f, radius, lam[0], spec);
    if (p.n != 2)
        throw Error("forward transform implemented for n <= 2");
    TwoBody tb(p, spec.psi_tol);
    double H = tb.u_step();
    int kmax = static_cast<int>(std::ceil(2.0 * radius / H)) + 1;
    double L = lam[0] + lam[1], l = lam[0] - lam[1];
    std::vector<std::vector<double>> perr;
    auto P = tb.on_grid(kmax, {l}, &perr);
    std::vector<cplx> terms(kmax + 1);
    std::vector<double> mags(kmax + 1);
    parallel_for(terms.size(), [&](std::size_t k) {
        double u = H * static_cast<double>(k);
        cplx w = tb.mu_r(u) * detail::reduced_fourier(f, radius, L, u, 1e-13);
        terms[k] = (k == 0 ? 1.0 : 2.0) * w * P[0][k];
        mags[k] = (k == 0 ? 1.0 : 2.0) * std::abs(w) * perr[0][k];
    });
    cplx fine = 0.0, coarse = 0.0;
    double mass = 0.0, e_psi = 0.0;
    for (int k = 0; k <= kmax; ++k) {
        fine += terms[k];
        if (k % 2 == 0)
            coarse += terms[k];
        mass += std::abs(terms[k]);
        e_psi += mags[k];
    }
    double diff = H * std::abs(fine - 2.0 * coarse);
    double err = (mass > 0.0 ? diff * diff / (H * mass) : 0.0) + H * e_psi;
    return {H * fine, err, true, {}};
}

inline TransformValue forward_t(const AnalyticTestFunction& phi, const RealTuple& lam, const SystemParams& p,
                                const TransformSpec& spec = {})
{
    return forward_t_func(phi.as_func(), phi.truncation_radius(1e-16), lam, p, spec);
}

inline TransformValue inverse_t(const SpectralFunction& chi, const RealTuple& x, const SystemParams& p,
                                const TransformSpec& spec = {})
{
    if (static_cast<int>(x.size()) != p.n)
        throw Error("tuple length does not match particle number");
    if (p.n == 1) {
        double r = observed_radius([&](double l) { return std::abs(chi(RealTuple{l})); }, spec.image_tol);
        return inverse_t_n1(chi.eval, r, x[0], spec);
    }
    if (p.n != 2)
        throw Error("inverse transform implemented for n <= 2");
    TwoBody tb(p, spec.psi_tol);
    ImageGrid img;
    img.delta = spec.grid_spacing;
    double rl = observed_radius([&](double L) { return std::abs(chi(RealTuple{0.5 * L, 0.5 * L})); },
                                spec.image_tol, 0.5, spec.lambda_cap);
    double re = observed_radius(
        [&](double l) { return std::abs(mu_half(TwoBody::pair(0.0, l), hatted(p)) * chi(RealTuple{0.5 * l, -0.5 * l})); },
        spec.image_tol, 0.5, spec.ell_cap);
    img.lam_n = static_cast<int>(std::ceil(rl / img.delta));
    img.ell_n = static_cast<int>(std::ceil(re / img.delta));
    img.v.resize(static_cast<std::size_t>(2 * img.lam_n + 1) * (img.ell_n + 1));
    img.err.assign(img.v.size(), 0.0);
    for (int i = -img.lam_n; i <= img.lam_n; ++i)
        for (int j = 0; j <= img.ell_n; ++j)
            img.v[static_cast<std::size_t>(i + img.lam_n) * (img.ell_n + 1) + j] = chi(img.lambda_tuple(i, j));
    return inverse_from_image(img, x, tb);
}

struct Residual {
    double value = 0.0;
    double error_estimate = 0.0;
    bool flagged = false;
    cplx lhs{}, rhs{};
};

inline Residual make_residual(cplx lhs, cplx rhs, double err, double tol_flag = 1e-3)
{
    Residual r;
    r.lhs = lhs;
    r.rhs = rhs;
    double den = std::max(std::abs(rhs), 1e-300);
    r.value = std::abs(lhs - rhs) / den;
    r.error_estimate = err / den;
    r.flagged = r.error_estimate > tol_flag;
    if (rhs == cplx(0.0) && lhs == cplx(0.0))
        r.value = 0.0;
    return r;
}

inline Residual inversion_residual(const AnalyticTestFunction& phi, const RealTuple& x, const SystemParams& p,
                                   const TransformSpec& spec = {})
{
    cplx target = phi(to_points(x));
    if (p.n == 1) {
        double R = phi.truncation_radius(1e-16);
        Func f = phi.as_func();
        auto chi = [&](const RealTuple& l) { return forward_t_n1(f, R, l[0], spec).value; };
        double rl = observed_radius([&](double l) { return std::abs(chi(RealTuple{l})); }, spec.image_tol * 1e-2);
        auto v = inverse_t_n1(chi, rl, x[0], spec);
        return make_residual(v.value, target, v.error_estimate, 1e-8);
    }
    if (p.n != 2)
        throw Error("inversion residual implemented for n <= 2");
    TwoBody tb(p, spec.psi_tol);
    auto img = image_n2(phi, tb, spec);
    auto v = inverse_from_image(img, x, tb);
    return make_residual(v.value, target, v.error_estimate);
}

inline QuadratureSpec box_spec(double radius, double rel)
{
    QuadratureSpec s;
    s.rel_tol = rel;
    s.abs_tol = 1e-15;
    s.truncation_radius = {radius};
    s.max_nodes_per_dim = 21 * 600;
    return s;
}

// int d^2x w(x) a(x) b(x) with w depending on x1 - x2 only.
inline IntegralResult reduced_spatial_pairing(const std::function<cplx(double)>& w_r,
                                              const std::function<cplx(const PointTuple&)>& ab, double radius,
                                              double rel)
{
    auto outer = [&](double u) {
        cplx w = w_r(u);
        if (w == cplx(0.0))
            return cplx(0.0);
        auto inner = [&](double X) { return ab(TwoBody::pair(X, u)); };
        return w * detail::line_integral(inner, -radius, radius, rel * 1e-2, 1e-300).value;
    };
    return detail::line_integral(outer, -2.0 * radius, 2.0 * radius, rel, 1e-15, 0.5);
}

// (T phi1, T phi2)_mu^ against (phi1(-x), phi2)_mu; the bilinear form reflects its first slot, so the right side is int mu phi1 phi2.
inline Residual parseval_residual(const AnalyticTestFunction& a, const AnalyticTestFunction& b,
                                  const SystemParams& p, const TransformSpec& spec = {})
{
    Func fa = a.as_func(), fb = b.as_func();
    double R = pairing_radius(a, b, 1e-16);
    if (p.n == 1) {
        auto lhs_f = [&](double l) {
            return forward_t_n1(fa, R, -l, spec).value * forward_t_n1(fb, R, l, spec).value;
        };
        double rl = observed_radius([&](double l) { return std::abs(lhs_f(l)); }, 1e-16);
        auto lhs = detail::line_integral(lhs_f, -rl, rl, spec.rel_tol, spec.abs_tol, 0.5);
        auto rhs = detail::line_integral([&](double x) { return fa(detail::one(x)) * fb(detail::one(x)); }, -R, R,
                                         spec.rel_tol, spec.abs_tol);
        return make_residual(lhs.value, rhs.value, lhs.error_estimate + rhs.error_estimate, 1e-8);
    }
    if (p.n != 2)
        throw Error("parseval residual implemented for n <= 2");
    TwoBody tb(p, spec.psi_tol);
    auto ia = image_n2(a, tb, spec), ib = image_n2(b, tb, spec);
    int ln = std::min(ia.lam_n, ib.lam_n), en = std::min(ia.ell_n, ib.ell_n);
    std::vector<cplx> mh(en + 1);
    parallel_for(mh.size(), [&](std::size_t j) { mh[j] = tb.mu_hat_r(ia.ell(static_cast<int>(j))); });
    ImageGrid frame = ia;
    frame.lam_n = ln;
    frame.ell_n = en;
    double extra = 0.0;
    auto cell = [&](int i, int j) {
        cplx m = mh[std::abs(j)];
        extra += ia.delta * ia.delta / 2.0 * std::abs(m) *
                 (ia.error_at(-i, -j) * std::abs(ib.at(i, j)) + std::abs(ia.at(-i, -j)) * ib.error_at(i, j));
        return m * ia.at(-i, -j) * ib.at(i, j);
    };
    double mass;
    auto [fine, coarse] = detail::grid_sum(frame, cell, mass);
    auto lhs = detail::finish(fine, coarse, mass, ia.delta, extra);
    auto rhs = reduced_spatial_pairing([&](double u) { return tb.mu_r(u); },
                                       [&](const PointTuple& x) { return fa(x) * fb(x); }, R, 1e-10);
    return make_residual(lhs.value, rhs.value, lhs.error_estimate + rhs.error_estimate);
}

// ---------- regime-aware transforms ----------

inline void require_regime(const SystemParams& p)
{
    if (classify_regime(p).tag == RegimeTag::None)
        throw Error("parameters are not in a unitarity regime");
}

inline TransformValue forward_f(const AnalyticTestFunction& phi, const RealTuple& lam, const SystemParams& p,
                                const TransformSpec& spec = {})
{
    require_regime(p);
    auto t = forward_t(phi, lam, p, spec);
    if (classify_regime(p).spatial_delta())
        t.value *= eta_hat(to_points(lam), p);
    return t;
}

inline TransformValue inverse_f(const SpectralFunction& chi, const RealTuple& x, const SystemParams& p,
                                const TransformSpec& spec = {})
{
    require_regime(p);
    if (!classify_regime(p).spatial_delta())
        return inverse_t(chi, x, p, spec);
    SpectralFunction scaled{[&](const RealTuple& l) { return chi(l) / eta_hat(to_points(l), p); }, chi.provenance};
    return inverse_t(scaled, x, p, spec);
}

// <F phi1, F phi2>_w^ against <phi1, phi2>_w.
inline Residual isometry_residual(const AnalyticTestFunction& a, const AnalyticTestFunction& b,
                                  const SystemParams& p, const TransformSpec& spec = {})
{
    require_regime(p);
    bool delta_w = classify_regime(p).spatial_delta();
    Func fa = a.as_func(), fb = b.as_func();
    double R = pairing_radius(a, b, 1e-16);
    if (p.n == 1) {
        auto lhs_f = [&](double l) {
            cplx ta = forward_t_n1(fa, R, l, spec).value, tb = forward_t_n1(fb, R, l, spec).value;
            return std::conj(ta) * tb;
        };
        double rl = observed_radius([&](double l) { return std::abs(lhs_f(l)); }, 1e-16);
        auto lhs = detail::line_integral(lhs_f, -rl, rl, spec.rel_tol, spec.abs_tol, 0.5);
        auto rhs = detail::line_integral(
            [&](double x) { return std::conj(fa(detail::one(x))) * fb(detail::one(x)); }, -R, R, spec.rel_tol,
            spec.abs_tol);
        return make_residual(lhs.value, rhs.value, lhs.error_estimate + rhs.error_estimate, 1e-8);
    }
    if (p.n != 2)
        throw Error("isometry residual implemented for n <= 2");
    TwoBody tb(p, spec.psi_tol);
    auto ia = image_n2(a, tb, spec), ib = image_n2(b, tb, spec);
    int ln = std::min(ia.lam_n, ib.lam_n), en = std::min(ia.ell_n, ib.ell_n);
    std::vector<cplx> wh(en + 1), eh(en + 1, 1.0);
    parallel_for(wh.size(), [&](std::size_t j) {
        double l = ia.ell(static_cast<int>(j));
        wh[j] = delta_w ? tb.delta_hat_r(l) : tb.mu_hat_r(l);
        if (delta_w)
            eh[j] = tb.eta_hat_r(l);
    });
    ImageGrid frame = ia;
    frame.lam_n = ln;
    frame.ell_n = en;
    double extra = 0.0;
    auto cell = [&](int i, int j) {
        int k = std::abs(j);
        cplx fa_v = eh[k] * ia.at(i, j), fb_v = eh[k] * ib.at(i, j);
        extra += ia.delta * ia.delta / 2.0 * std::abs(wh[k]) *
                 (ia.error_at(i, j) * std::abs(fb_v) + std::abs(fa_v) * ib.error_at(i, j));
        return wh[k] * std::conj(fa_v) * fb_v;
    };
    double mass;
    auto [fine, coarse] = detail::grid_sum(frame, cell, mass);
    auto lhs = detail::finish(fine, coarse, mass, ia.delta, extra);
    auto rhs = reduced_spatial_pairing([&](double u) { return delta_w ? tb.delta_r(u) : tb.mu_r(u); },
                                       [&](const PointTuple& x) { return std::conj(fa(x)) * fb(x); }, R, 1e-10);
    return make_residual(lhs.value, rhs.value, lhs.error_estimate + rhs.error_estimate);
}

// ---------- rescaled transform U ----------

inline TransformValue rescaled_u_n1(const AnalyticTestFunction& phi, double lam, const SystemParams& p,
                                    const TransformSpec& spec = {})
{
    require_regime(p);
    double pp = p.w.prod().real();
    Func f = phi.as_func();
    double R = phi.truncation_radius(1e-16);
    auto v = forward_t_n1(f, R, lam / pp, spec);
    v.value /= std::sqrt(pp);
    v.error_estimate /= std::sqrt(pp);
    return v;
}

// [U U phi](x) against phi(-x) for phi = sqrt(w) varphi; w = 1 at n = 1.
inline Residual u_squared_residual(const AnalyticTestFunction& phi, const RealTuple& x, const SystemParams& p,
                                   const TransformSpec& spec = {})
{
    require_regime(p);
    auto regime = classify_regime(p);
    double pp = p.w.prod().real();
    cplx target = phi(negate(to_points(x)));
    if (p.n == 1) {
        auto chi = [&](double l) { return rescaled_u_n1(phi, l, p, spec).value; };
        double rl = observed_radius([&](double l) { return std::abs(chi(l)); }, spec.image_tol * 1e-2);
        auto g = [&](double l) { return std::exp(-2.0 * pi * I * l * x[0] / pp) / std::sqrt(pp) * chi(l); };
        auto v = detail::line_integral(g, -rl, rl, spec.rel_tol, spec.abs_tol, 0.5);
        return make_residual(v.value, target, v.error_estimate, 1e-8);
    }
    if (p.n != 2)
        throw Error("U^2 check implemented for n <= 2");
    TwoBody tb(p, spec.psi_tol);
    auto img = image_n2(phi, tb, spec, ImageKind::u_transform);
    bool mu_w = regime.spatial_mu();
    double X = 0.5 * (x[0] + x[1]), u = x[0] - x[1];
    cplx wx = mu_w ? tb.mu_r(u) : tb.delta_r(u);
    target *= std::sqrt(std::max(0.0, wx.real()));
    double sigma = u / pp;
    std::vector<cplx> psi(img.ell_n + 1), wl(img.ell_n + 1);
    std::vector<double> perr(img.ell_n + 1, 0.0);
    parallel_for(psi.size(), [&](std::size_t j) {
        double l = img.ell(static_cast<int>(j));
        std::vector<double> e;
        psi[j] = tb.at_u(l, {sigma}, &e)[0];
        perr[j] = e[0];
        cplx w = mu_w ? tb.mu_r(l) : tb.delta_r(l);
        wl[j] = std::sqrt(std::max(0.0, w.real()));
    });
    cplx wh = mu_w ? tb.mu_hat_r(sigma) : tb.delta_hat_r(sigma);
    double pre = std::sqrt(std::max(0.0, wh.real())) / pp;
    double extra = 0.0;
    auto cell = [&](int i, int j) {
        int k = std::abs(j);
        cplx t = pre * wl[k] * std::exp(-2.0 * pi * I * img.Lambda(i) * X / pp) * std::conj(psi[k]);
        extra += img.delta * img.delta / 2.0 *
                 (std::abs(t) * img.error_at(i, j) + pre * std::abs(wl[k] * img.at(i, j)) * perr[k]);
        return t * img.at(i, j);
    };
    double mass;
    auto [fine, coarse] = detail::grid_sum(img, cell, mass);
    auto v = detail::finish(fine, coarse, mass, img.delta, extra);
    return make_residual(v.value, target, v.error_estimate);
}

// ---------- regularized pairings ----------

inline cplx regularized_pairing_explicit(const RegularizerParams& reg, const RealTuple& x, const RealTuple& y,
                                         const SystemParams& p)
{
    reg.validate(p);
    if (!(reg.eps > 0.0))
        throw Error("explicit regularized pairing requires eps > 0");
    int n = p.n;
    SystemParams hp = hatted(p);
    cplx base = std::sqrt(p.w.prod()) * s2(p.g / p.w.prod(), hp.w);
    double sx = 0.0;
    for (int j = 0; j < n; ++j)
        sx += x[j] - y[j];
    cplx acc = std::pow(base, -static_cast<double>(n)) * std::exp(2.0 * pi * I * reg.lambda_reg * sx);
    cplx sh = I * 0.5 * p.g_star() - I * reg.eps;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            acc *= kernel_k(x[j] - y[k] + sh, p);
    return acc;
}

struct RegularizedWindow {
    double lo, hi;
};

// Integration window per spectral coordinate from the regularizer decay.
inline RegularizedWindow regularizer_window(const RegularizerParams& reg, const SystemParams& p, double tol,
                                            double rate_low_scale = 1.0)
{
    double lt = std::log(1.0 / tol);
    double lo_rate = 2.0 * pi * reg.eps * rate_low_scale;
    double hi_rate = pi * (2.0 * p.g_star().real() - 2.0 * reg.eps) * rate_low_scale;
    return {reg.lambda_reg - lt / lo_rate - 1.0, reg.lambda_reg + lt / hi_rate + 1.0};
}

inline TransformValue regularized_pairing_numeric(const RegularizerParams& reg, const RealTuple& x,
                                                  const RealTuple& y, const SystemParams& p,
                                                  const TransformSpec& spec = {}, double delta = 0.1,
                                                  TwoBody* shared = nullptr)
{
    reg.validate(p);
    if (reg.eps == 0.0)
        throw Error("no tail decay; explicit formula only");
    auto win = regularizer_window(reg, p, 1e-10);
    if (p.n == 1) {
        auto f = [&](double l) {
            return std::exp(2.0 * pi * I * l * (x[0] - y[0])) * regularizer_r(reg, RealTuple{l}, p);
        };
        auto r = detail::line_integral(f, win.lo, win.hi, 1e-12, 1e-15, 0.5);
        return {r.value, r.error_estimate, r.converged, {}};
    }
    if (p.n != 2)
        throw Error("regularized pairing implemented for n <= 2");
    std::unique_ptr<TwoBody> own;
    if (!shared) {
        own = std::make_unique<TwoBody>(p, spec.psi_tol);
        shared = own.get();
    }
    TwoBody& tb = *shared;
    SystemParams hp = hatted(p);
    double X = 0.5 * (x[0] + x[1]), ux = x[0] - x[1];
    double Y = 0.5 * (y[0] + y[1]), uy = y[0] - y[1];
    int m_lo = static_cast<int>(std::floor(2.0 * win.lo / delta)), m_hi = static_cast<int>(std::ceil(2.0 * win.hi / delta));
    // K^(lambda_reg - m delta/2) on the lambda_j lattice
    std::vector<cplx> kh(m_hi - m_lo + 1);
    parallel_for(kh.size(), [&](std::size_t i) {
        kh[i] = kernel_k(reg.lambda_reg - 0.5 * delta * static_cast<double>(m_lo + static_cast<int>(i)), hp);
    });
    int ell_n = (m_hi - m_lo) / 2 + 1;
    std::vector<double> ells(ell_n + 1);
    for (int j = 0; j <= ell_n; ++j)
        ells[j] = delta * j;
    std::vector<double> ex, ey;
    auto px = tb.at_u(ux, ells, &ex), py = tb.at_u(uy, ells, &ey);
    std::vector<cplx> mh(ell_n + 1);
    parallel_for(mh.size(), [&](std::size_t j) { mh[j] = tb.mu_hat_r(ells[j]); });
    cplx gexp = pi * (p.g_star() - 2.0 * reg.eps);
    cplx fine = 0.0, coarse = 0.0;
    double mass = 0.0, extra = 0.0;
    for (int j = -ell_n; j <= ell_n; ++j) {
        int a = std::abs(j);
        cplx pj = mh[a] * px[a] * py[a];
        double pe = std::abs(mh[a]) * (std::abs(px[a]) * ey[a] + ex[a] * std::abs(py[a]));
        for (int i = m_lo; i <= m_hi; ++i) {
            int m1 = i + j, m2 = i - j;  // lambda_1 = m1 delta/2, lambda_2 = m2 delta/2
            if (m1 < m_lo || m1 > m_hi || m2 < m_lo || m2 > m_hi)
                continue;
            double L = delta * i;
            cplx R = std::exp(gexp * (2.0 * reg.lambda_reg - L)) * kh[m1 - m_lo] * kh[m2 - m_lo];
            cplx t = std::exp(2.0 * pi * I * (X - Y) * L) * pj * R;
            fine += t;
            mass += std::abs(t);
            extra += pe * std::abs(R);
            if (i % 2 == 0 && j % 2 == 0)
                coarse += t;
        }
    }
    double w = delta * delta / 2.0;
    auto out = detail::finish(w * fine, 4.0 * w * coarse, mass, delta, w * extra);
    return out;
}

inline TransformValue regime34_scalar_numeric(const RegularizerParams& reg, const RealTuple& x, const RealTuple& y,
                                              const SystemParams& p, const TransformSpec& spec = {})
{
    auto r = classify_regime(p);
    if (!r.spatial_delta())
        throw Error("regularized scalar product requires regime III or IV");
    reg.validate(p);
    if (reg.eps == 0.0)
        throw Error("no tail decay; explicit formula only");
    if (p.n != 1)
        throw Error("regime III/IV regularized scalar product implemented for n = 1");
    auto win = regularizer_window(reg, p, 1e-12, 2.0);
    auto f = [&](double l) {
        cplx R = regularizer_r(reg, RealTuple{l}, p);
        return delta_hat(detail::one(l), p) * std::exp(2.0 * pi * I * l * (x[0] - y[0])) * std::norm(R);
    };
    auto res = detail::line_integral(f, win.lo, win.hi, spec.rel_tol, 1e-15, 0.5);
    return {res.value, res.error_estimate, res.converged, {}};
}

inline TransformValue regime34_scalar_explicit(const RegularizerParams& reg, const RealTuple& x, const RealTuple& y,
                                               const SystemParams& p, const TransformSpec& spec = {})
{
    auto r = classify_regime(p);
    if (!r.spatial_delta())
        throw Error("regularized scalar product requires regime III or IV");
    reg.validate(p);
    if (!(reg.eps > 0.0))
        throw Error("explicit regularized scalar product requires eps > 0");
    int n = p.n;
    if (n > 2)
        throw Error("regime III/IV regularized scalar product implemented for n <= 2");
    TransformValue out;
    double sep = 1e300;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            sep = std::min(sep, std::abs(x[j] - y[k]));
    if (reg.eps < 0.02 && sep < 0.05)
        out.warning = "pinch: poles of the integrand approach the contour";
    SystemParams ps = reflect_coupling(p);
    double sx = 0.0, span = 0.0;
    for (int j = 0; j < n; ++j) {
        sx += x[j] - y[j];
        span = std::max({span, std::abs(x[j]), std::abs(y[j])});
    }
    cplx pre = std::pow(p.w.prod(), -static_cast<double>(n)) * eta(to_points(y), p) / eta(to_points(x), p) *
               std::exp(2.0 * pi * I * reg.lambda_reg * sx);
    cplx sa = I * 0.5 * p.g - I * reg.eps, sb = -I * 0.5 * p.g_star() + I * reg.eps;
    auto kern = [&](const PointTuple& z) {
        cplx acc = delta_measure(z, p);
        if (acc == cplx(0.0))
            return cplx(0.0);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                acc *= kernel_k(x[j] - z[k] + sa, ps) * kernel_k(y[j] - z[k] + sb, p);
        return acc;
    };
    double rate = pi * (p.w.sum() / p.w.prod()).real();
    double R = span + (std::log(1.0 / 1e-14) + 4.0) / rate;
    IntegralResult res;
    if (n == 1)
        res = detail::line_integral([&](double z) { return kern(detail::one(z)); }, -R, R, spec.rel_tol, 1e-16, 0.5);
    else
        res = integrate_box([&](std::span<const double> t) { return kern(PointTuple{cplx(t[0]), cplx(t[1])}); }, 2,
                            box_spec(R, 1e-9));
    out.value = pre * res.value;
    out.error_estimate = std::abs(pre) * res.error_estimate;
    out.converged = res.converged;
    return out;
}

// int dy mu(y) phi(y) (Psi(y), Psi(x))^{lambda, eps} at each schedule point, n = 1.
inline std::vector<cplx> delta_probe(const AnalyticTestFunction& phi, const RealTuple& x,
                                     const std::vector<RegularizerParams>& schedule, const SystemParams& p,
                                     const TransformSpec& spec = {})
{
    if (p.n != 1)
        throw Error("delta probe implemented for n = 1");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i].eps > schedule[i - 1].eps || schedule[i].lambda_reg < schedule[i - 1].lambda_reg)
            throw Error("schedule must have non-increasing eps and non-decreasing lambda_reg");
    Func f = phi.as_func();
    double R = phi.truncation_radius(1e-16) + std::abs(x[0]);
    std::vector<cplx> out;
    for (const auto& reg : schedule) {
        auto g = [&](double y) {
            return f(detail::one(y)) * regularized_pairing_explicit(reg, x, RealTuple{y}, p);
        };
        // breakpoints graded geometrically away from the peak at y = x
        std::vector<double> cuts{x[0]};
        for (double w = reg.eps; x[0] + w < R || x[0] - w > -R; w *= 4.0) {
            cuts.push_back(x[0] + std::min(w, R - x[0]));
            cuts.push_back(x[0] - std::min(w, R + x[0]));
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        double panel = std::min(0.25, 0.5 / reg.lambda_reg);
        cplx acc = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            acc += detail::line_integral(g, cuts[i], cuts[i + 1], spec.rel_tol, 1e-16, panel).value;
        out.push_back(acc);
    }
    return out;
}

// ---------- image decay ----------

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    int points = 0;
};

inline SlopeFit fit_log_linear(const std::vector<double>& t, const std::vector<double>& v)
{
    SlopeFit f;
    double st = 0, sv = 0, stt = 0, stv = 0;
    int m = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(v[i] > 0.0))
            continue;
        double y = std::log(v[i]);
        st += t[i];
        sv += y;
        stt += t[i] * t[i];
        stv += t[i] * y;
        ++m;
    }
    f.points = m;
    if (m < 2)
        return f;
    f.slope = (m * stv - st * sv) / (m * stt - st * st);
    f.intercept = (sv - f.slope * st) / m;
    return f;
}

// Log-linear fit of |mu^'(lambda) [T phi](lambda)| along lambda = (t, -t).
inline SlopeFit image_decay_slope(const ImageGrid& img, const SystemParams& p, double from = 1.0,
                                  double noise = 1e-13)
{
    std::vector<double> t, v;
    double peak = 0.0;
    for (int j = 0; j <= img.ell_n; ++j) {
        double l = img.ell(j);
        double val = std::abs(mu_half(TwoBody::pair(0.0, l), hatted(p)) * img.at(0, j));
        peak = std::max(peak, val);
        if (l >= from && val > noise * peak) {
            t.push_back(l);
            v.push_back(val);
        }
    }
    return fit_log_linear(t, v);
}

// [U phi](lambda) for phi = sqrt(w) varphi; w = 1 at n = 1.
inline TransformValue rescaled_u(const AnalyticTestFunction& varphi, const RealTuple& lam, const SystemParams& p,
                                 const TransformSpec& spec = {})
{
    require_regime(p);
    if (static_cast<int>(lam.size()) != p.n)
        throw Error("tuple length does not match particle number");
    if (p.n == 1)
        return rescaled_u_n1(varphi, lam[0], p, spec);
    if (p.n != 2)
        throw Error("rescaled transform implemented for n <= 2");
    bool mu_w = classify_regime(p).spatial_mu();
    double pp = p.w.prod().real();
    TwoBody tb(p, spec.psi_tol);
    Func f = varphi.as_func();
    double R = varphi.truncation_radius(1e-16);
    double H = tb.u_step();
    int kmax = static_cast<int>(std::ceil(2.0 * R / H)) + 1;
    double L = (lam[0] + lam[1]) / pp, l = (lam[0] - lam[1]) / pp;
    auto P = tb.on_grid(kmax, {l});
    std::vector<cplx> terms(kmax + 1);
    parallel_for(terms.size(), [&](std::size_t k) {
        double u = H * static_cast<double>(k);
        cplx w = mu_w ? tb.mu_r(u) : tb.delta_r(u);
        terms[k] = (k == 0 ? 1.0 : 2.0) * w * std::conj(P[0][k]) * detail::reduced_fourier(f, R, L, u, 1e-13);
    });
    cplx acc = std::accumulate(terms.begin(), terms.end(), cplx(0.0));
    cplx wh = mu_w ? tb.mu_hat_r(l) : tb.delta_hat_r(l);
    return {std::sqrt(std::max(0.0, wh.real())) / pp * H * acc, 0.0, true, {}};
}

// (chi, T phi)_mu^ against (T^dagger chi(-x), phi)_mu at n = 1.
inline Residual adjointness_residual_n1(const SpecFunc& chi, const AnalyticTestFunction& phi,
                                        const SystemParams& p, const TransformSpec& spec = {})
{
    if (p.n != 1)
        throw Error("adjointness probe implemented for n = 1");
    Func f = phi.as_func();
    double R = phi.truncation_radius(1e-16);
    double rl = observed_radius([&](double l) { return std::abs(chi(RealTuple{l})); }, 1e-16);
    auto lhs = detail::line_integral(
        [&](double l) { return chi(RealTuple{-l}) * forward_t_n1(f, R, l, spec).value; }, -rl, rl, spec.rel_tol,
        spec.abs_tol, 0.5);
    auto rhs = detail::line_integral(
        [&](double x) { return inverse_t_n1(chi, rl, x, spec).value * f(detail::one(x)); }, -R, R, spec.rel_tol,
        spec.abs_tol, 0.5);
    return make_residual(lhs.value, rhs.value, lhs.error_estimate + rhs.error_estimate, 1e-8);
}

// [T T^dagger chi](lambda) against chi(lambda) at n = 1.
inline Residual mirror_residual_n1(const SpecFunc& chi, double lam, const SystemParams& p,
                                   const TransformSpec& spec = {})
{
    if (p.n != 1)
        throw Error("bispectral mirror implemented for n = 1");
    double rl = observed_radius([&](double l) { return std::abs(chi(RealTuple{l})); }, 1e-16);
    Func g = [&](const PointTuple& x) { return inverse_t_n1(chi, rl, x[0].real(), spec).value; };
    double rx = observed_radius([&](double x) { return std::abs(g(detail::one(x))); }, 1e-16);
    auto v = forward_t_n1(g, rx, lam, spec);
    return make_residual(v.value, chi(RealTuple{lam}), v.error_estimate, 1e-8);
}

// [T phi](lambda + alpha e) against the transform of exp(-2 pi i alpha sum x) phi.
inline Residual shift_compat_residual(const AnalyticTestFunction& phi, const RealTuple& lam, double alpha,
                                      const SystemParams& p, const TransformSpec& spec = {})
{
    Func f = phi.as_func();
    double R = phi.truncation_radius(1e-16);
    RealTuple shifted = lam;
    for (double& l : shifted)
        l += alpha;
    Func g = [&](const PointTuple& x) {
        cplx s = std::accumulate(x.begin(), x.end(), cplx(0.0));
        return std::exp(-2.0 * pi * I * alpha * s) * f(x);
    };
    auto a = forward_t_func(f, R, shifted, p, spec);
    auto b = forward_t_func(g, R, lam, p, spec);
    return make_residual(a.value, b.value, a.error_estimate + b.error_estimate);
}

} // namespace rsr
