#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <queue>
#include <shared_mutex>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rsr/types.hpp"

namespace rsr {

struct QuadratureSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_nodes_per_dim = 20000;
    std::vector<double> truncation_radius{10.0};
    int refinement_limit = 40;

    double radius(std::size_t dim) const
    {
        if (truncation_radius.empty())
            throw Error("quadrature spec has no truncation radius");
        return truncation_radius[std::min(dim, truncation_radius.size() - 1)];
    }

    void validate() const
    {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw Error("quadrature tolerances must be positive");
        if (max_nodes_per_dim < 8)
            throw Error("max_nodes_per_dim must be at least 8");
        if (truncation_radius.empty())
            throw Error("quadrature spec has no truncation radius");
        for (double r : truncation_radius)
            if (!(r > 0.0))
                throw Error("truncation radius must be positive");
    }
};

struct IntegralResult {
    cplx value{0.0, 0.0};
    double error_estimate = 0.0;
    long nodes_used = 0;
    bool converged = true;
};

inline double estimate_truncation_radius(double decay_rate, double amplitude, double abs_tol)
{
    if (!(decay_rate > 0.0))
        throw Error("non-integrable tail");
    if (!(amplitude > 0.0) || !(abs_tol > 0.0))
        throw Error("amplitude and tolerance must be positive");
    double r = std::log(amplitude / (decay_rate * abs_tol)) / decay_rate;
    return std::max(r, 1e-8);
}

namespace detail {

struct GK21 {
    std::array<double, 11> x{};
    std::array<double, 11> wk{};
    std::array<double, 11> wg{};

    GK21()
    {
        using boost::math::quadrature::gauss;
        using boost::math::quadrature::gauss_kronrod;
        const auto& ax = gauss_kronrod<double, 21>::abscissa();
        const auto& w = gauss_kronrod<double, 21>::weights();
        const auto& gx = gauss<double, 10>::abscissa();
        const auto& gw = gauss<double, 10>::weights();
        for (std::size_t i = 0; i < 11; ++i) {
            x[i] = ax[i];
            wk[i] = w[i];
            for (std::size_t j = 0; j < gx.size(); ++j)
                if (std::abs(gx[j] - ax[i]) < 1e-14)
                    wg[i] = gw[j];
        }
    }
};

inline const GK21& gk21()
{
    static const GK21 rule;
    return rule;
}

struct Panel {
    double a, b;
    cplx value;
    double err;
    double mass;
    bool operator<(const Panel& o) const { return err < o.err; }
};

template <class F>
Panel gk_panel(F& f, double a, double b)
{
    const auto& r = gk21();
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<cplx, 21> fv;
    fv[0] = f(c);
    for (std::size_t i = 1; i < 11; ++i) {
        fv[2 * i - 1] = f(c - h * r.x[i]);
        fv[2 * i] = f(c + h * r.x[i]);
    }
    cplx k = r.wk[0] * fv[0], g = r.wg[0] * fv[0];
    for (std::size_t i = 1; i < 11; ++i) {
        cplx s = fv[2 * i - 1] + fv[2 * i];
        k += r.wk[i] * s;
        g += r.wg[i] * s;
    }
    for (const auto& v : fv)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error("integrand singular on contour");
    cplx mean = 0.5 * k;
    double asc = r.wk[0] * std::abs(fv[0] - mean), abs_sum = r.wk[0] * std::abs(fv[0]);
    for (std::size_t i = 1; i < 11; ++i) {
        asc += r.wk[i] * (std::abs(fv[2 * i - 1] - mean) + std::abs(fv[2 * i] - mean));
        abs_sum += r.wk[i] * (std::abs(fv[2 * i - 1]) + std::abs(fv[2 * i]));
    }
    k *= h;
    g *= h;
    asc *= std::abs(h);
    abs_sum *= std::abs(h);
    double err = std::abs(k - g);
    if (asc > 0.0 && err > 0.0)
        err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    err = std::max(err, 50.0 * 2.2e-16 * abs_sum);
    return {a, b, k, err, abs_sum};
}

} // namespace detail

// Global adaptive Gauss-Kronrod 21/10 on [a, b], optionally pre-split into panels.
template <class F>
IntegralResult integrate_interval(F&& f, double a, double b, double rel_tol, double abs_tol,
                                  int max_panels = 2000, int initial_panels = 1)
{
    IntegralResult res;
    if (a == b)
        return res;
    std::priority_queue<detail::Panel> q;
    cplx total = 0.0;
    double err = 0.0, mass = 0.0;
    initial_panels = std::max(1, initial_panels);
    double step = (b - a) / initial_panels;
    for (int i = 0; i < initial_panels; ++i) {
        double lo = a + i * step, hi = (i + 1 == initial_panels) ? b : a + (i + 1) * step;
        auto p = detail::gk_panel(f, lo, hi);
        total += p.value;
        err += p.err;
        mass += p.mass;
        q.push(p);
    }
    int panels = initial_panels;
    // roundoff floor: oscillatory integrands cannot beat eps times the absolute mass
    auto target = [&] { return std::max({abs_tol, rel_tol * std::abs(total), 100.0 * 2.2e-16 * mass}); };
    while (err > target()) {
        if (panels >= max_panels) {
            res.converged = false;
            break;
        }
        auto p = q.top();
        q.pop();
        double m = 0.5 * (p.a + p.b);
        auto l = detail::gk_panel(f, p.a, m);
        auto r = detail::gk_panel(f, m, p.b);
        total += l.value + r.value - p.value;
        err += l.err + r.err - p.err;
        mass += l.mass + r.mass - p.mass;
        q.push(l);
        q.push(r);
        ++panels;
        if (std::abs(p.b - p.a) < 1e-13 * std::max(1.0, std::abs(p.a))) {
            res.converged = false;
            break;
        }
    }
    // recompute sums to shed accumulated cancellation error
    total = 0.0;
    err = 0.0;
    mass = 0.0;
    while (!q.empty()) {
        total += q.top().value;
        err += q.top().err;
        mass += q.top().mass;
        q.pop();
    }
    res.value = total;
    res.error_estimate = err;
    res.nodes_used = 21L * (2L * panels - initial_panels);
    if (err > target())
        res.converged = false;
    return res;
}

template <class F>
IntegralResult integrate_line(F&& f, const QuadratureSpec& spec)
{
    spec.validate();
    double r = spec.radius(0);
    int panels = std::max(1, static_cast<int>(std::ceil(2.0 * r / 2.0)));
    int max_panels = std::max(panels + 1, spec.max_nodes_per_dim / 21);
    return integrate_interval(f, -r, r, spec.rel_tol, spec.abs_tol, max_panels, panels);
}

// Contour Im t = c, parametrised by real s: t = s + i c.
template <class F>
IntegralResult integrate_line_shifted(F&& f, double c, const QuadratureSpec& spec)
{
    auto g = [&](double s) { return f(cplx(s, c)); };
    return integrate_line(g, spec);
}

namespace detail {

template <class F>
IntegralResult box_level(F& f, std::vector<double>& pt, std::size_t dim, const QuadratureSpec& spec,
                         double& max_inner_err, long& nodes, bool& converged)
{
    std::size_t d = pt.size();
    double r = spec.radius(dim);
    int panels = std::max(1, static_cast<int>(std::ceil(r)));
    int max_panels = std::max(panels + 1, spec.max_nodes_per_dim / 21);
    double tol_scale = 1.0 / static_cast<double>(d);
    if (dim + 1 == d) {
        auto g = [&](double t) {
            pt[dim] = t;
            ++nodes;
            return f(std::span<const double>(pt.data(), d));
        };
        auto res = integrate_interval(g, -r, r, spec.rel_tol * tol_scale, spec.abs_tol * tol_scale,
                                      max_panels, panels);
        converged = converged && res.converged;
        return res;
    }
    auto g = [&](double t) {
        pt[dim] = t;
        auto inner = box_level(f, pt, dim + 1, spec, max_inner_err, nodes, converged);
        max_inner_err = std::max(max_inner_err, inner.error_estimate);
        return inner.value;
    };
    auto res = integrate_interval(g, -r, r, spec.rel_tol * tol_scale, spec.abs_tol * tol_scale,
                                  max_panels, panels);
    converged = converged && res.converged;
    return res;
}

} // namespace detail

// Tensorised nested adaptive quadrature over the box prod [-R_d, R_d].
template <class F>
IntegralResult integrate_box(F&& f, std::size_t d, const QuadratureSpec& spec)
{
    spec.validate();
    if (d == 0 || d > 4)
        throw Error("integrate_box supports 1 <= d <= 4");
    std::vector<double> pt(d, 0.0);
    double max_inner = 0.0;
    long nodes = 0;
    bool converged = true;
    auto res = detail::box_level(f, pt, 0, spec, max_inner, nodes, converged);
    if (d > 1)
        res.error_estimate += max_inner * 2.0 * spec.radius(0);
    res.nodes_used = nodes;
    res.converged = converged;
    return res;
}

// Memo cache keyed by (tag, coordinates rounded to a fixed granularity).
template <class Value>
class NodeCache {
public:
    explicit NodeCache(double granularity = 1e-14) : gran_(granularity) {}

    using Key = std::pair<int, std::vector<long long>>;

    Key key(int tag, std::span<const double> coords) const
    {
        std::vector<long long> k(coords.size());
        for (std::size_t i = 0; i < coords.size(); ++i)
            k[i] = std::llround(coords[i] / gran_);
        return {tag, std::move(k)};
    }

    std::optional<Value> find(const Key& k) const
    {
        std::shared_lock lock(mu_);
        auto it = map_.find(k);
        if (it == map_.end())
            return std::nullopt;
        return it->second;
    }

    void insert(const Key& k, const Value& v)
    {
        std::unique_lock lock(mu_);
        map_.emplace(k, v);
    }

    template <class Fn>
    Value get_or_compute(int tag, std::span<const double> coords, Fn&& fn)
    {
        auto k = key(tag, coords);
        if (auto v = find(k))
            return *v;
        Value v = fn();
        insert(k, v);
        return v;
    }

    std::size_t size() const
    {
        std::shared_lock lock(mu_);
        return map_.size();
    }

private:
    double gran_;
    mutable std::shared_mutex mu_;
    std::map<Key, Value> map_;
};

} // namespace rsr
