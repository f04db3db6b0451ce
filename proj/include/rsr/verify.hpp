#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rsr/double_sine.hpp"
#include "rsr/hamiltonian.hpp"
#include "rsr/measures.hpp"
#include "rsr/params.hpp"
#include "rsr/transform.hpp"
#include "rsr/wavefunction.hpp"

namespace rsr {

struct VerificationReport {
    std::string check;
    std::string params;
    int probes = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double wall_time = 0.0;
    std::string note;
};

struct SuiteResult {
    std::string suite;
    std::vector<VerificationReport> reports;
    double wall_time = 0.0;

    bool pass() const
    {
        for (const auto& r : reports)
            if (!r.pass)
                return false;
        return !reports.empty();
    }
    // Largest residual relative to its tolerance.
    double worst_ratio() const
    {
        double w = 0.0;
        for (const auto& r : reports)
            w = std::max(w, r.tolerance > 0.0 ? r.max_residual / r.tolerance : r.max_residual);
        return w;
    }
};

inline std::string describe(const SystemParams& p)
{
    std::ostringstream os;
    os.precision(6);
    os << "w1=" << p.w.w1.real() << (p.w.w1.imag() < 0 ? "" : "+") << p.w.w1.imag() << "i"
       << " w2=" << p.w.w2.real() << (p.w.w2.imag() < 0 ? "" : "+") << p.w.w2.imag() << "i"
       << " g=" << p.g.real() << (p.g.imag() < 0 ? "" : "+") << p.g.imag() << "i n=" << p.n;
    return os.str();
}

// Accumulates probe residuals for one check.
class Check {
public:
    Check(std::string name, std::string params, double tol) : start_(std::chrono::steady_clock::now())
    {
        r_.check = std::move(name);
        r_.params = std::move(params);
        r_.tolerance = tol;
    }
    void add(double residual)
    {
        ++r_.probes;
        if (!std::isfinite(residual))
            nonfinite_ = true;
        else
            r_.max_residual = std::max(r_.max_residual, residual);
    }
    void note(const std::string& s) { r_.note = r_.note.empty() ? s : r_.note + "; " + s; }
    void fail(const std::string& why)
    {
        forced_fail_ = true;
        note(why);
    }
    VerificationReport finish()
    {
        if (nonfinite_) {
            r_.max_residual = INFINITY;
            note("non-finite residual");
        }
        r_.pass = !forced_fail_ && r_.probes > 0 && r_.max_residual <= r_.tolerance;
        r_.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        return r_;
    }

private:
    VerificationReport r_;
    bool nonfinite_ = false, forced_fail_ = false;
    std::chrono::steady_clock::time_point start_;
};

inline double rel_err(cplx a, cplx b)
{
    double d = std::abs(b);
    return std::abs(a - b) / (d > 0.0 ? d : 1.0);
}

namespace suites {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

inline std::vector<Periods> s2_period_sets()
{
    return {Periods(1.0, 1.0), Periods(1.0, 2.0), Periods(cplx(1.0, 0.5), cplx(1.0, -0.5))};
}

// Difference, reflection and inversion equations on seeded strip points.
inline std::vector<VerificationReport> s2_equations(std::uint64_t seed, int points = 100)
{
    std::vector<VerificationReport> out;
    for (const auto& w : s2_period_sets()) {
        Rng rng(seed);
        std::string ps = describe(SystemParams(w, 0.5 * w.sum(), 1, false));
        Check d1("s2 difference w1", ps, 1e-10), d2("s2 difference w2", ps, 1e-10), rf("s2 reflection", ps, 1e-10),
            inv("s2 inversion", ps, 1e-10);
        for (int i = 0; i < points; ++i) {
            cplx z(uniform(rng, 0.05, 0.95) * w.sum().real(), uniform(rng, -1.5, 1.5));
            cplx s = s2(z, w);
            d1.add(std::abs(s / (2.0 * std::sin(pi * z / w.w2) * s2(z + w.w1, w)) - 1.0));
            d2.add(std::abs(s / (2.0 * std::sin(pi * z / w.w1) * s2(z + w.w2, w)) - 1.0));
            rf.add(std::abs(s * s2(w.sum() - z, w) - 1.0));
            inv.add(std::abs(s * s2(-z, w) / (-4.0 * std::sin(pi * z / w.w1) * std::sin(pi * z / w.w2)) - 1.0));
        }
        out.push_back(d1.finish());
        out.push_back(d2.finish());
        out.push_back(rf.finish());
        out.push_back(inv.finish());
    }
    return out;
}

inline std::vector<VerificationReport> s2_values()
{
    Periods w(1.0, 2.0);
    Check c("s2 special values", "w1=1 w2=2", 1e-10);
    c.add(std::abs(s2(1.0, w) - std::sqrt(2.0)) / std::sqrt(2.0));
    c.add(std::abs(s2(2.0, w) - 1.0 / std::sqrt(2.0)) * std::sqrt(2.0));
    return {c.finish()};
}

inline std::vector<VerificationReport> s2_homogeneity(std::uint64_t seed, int points = 50)
{
    std::vector<VerificationReport> out;
    for (const auto& w : s2_period_sets()) {
        Rng rng(seed);
        std::string ps = describe(SystemParams(w, 0.5 * w.sum(), 1, false));
        Check hom("s2 homogeneity", ps, 1e-10), swap("s2 period swap", ps, 1e-10),
            route("s2 continuation routes", ps, 1e-9);
        for (int i = 0; i < points; ++i) {
            cplx z(uniform(rng, -2.0, 4.0), uniform(rng, -1.0, 1.0));
            if (find_lattice_point(z, w, 1e-3))
                continue;
            cplx s = s2(z, w);
            for (double a : {0.5, 2.0, 3.7})
                hom.add(rel_err(s2(a * z, Periods(a * w.w1, a * w.w2)), s));
            swap.add(rel_err(s2(z, Periods(w.w2, w.w1)), s));
            route.add(rel_err(s2(z, w, Route::via_w1), s2(z, w, Route::via_w2)));
        }
        out.push_back(hom.finish());
        out.push_back(swap.finish());
        out.push_back(route.finish());
    }
    return out;
}

inline std::vector<VerificationReport> s2_asymptotics()
{
    std::vector<VerificationReport> out;
    for (const auto& w : {Periods(1.0, 1.0), Periods(1.0, 2.0)}) {
        Check c("s2 asymptotics", describe(SystemParams(w, 0.5 * w.sum(), 1, false)), 1e-4);
        for (double deg : {60.0, 75.0, 90.0, 105.0, 120.0}) {
            double th = deg * pi / 180.0;
            for (double side : {1.0, -1.0}) {
                cplx z(10.0 * std::cos(th) / std::sin(th), side * 10.0);
                c.add(std::abs(s2(z, w) / s2_asymptotic(z, w) - 1.0));
            }
        }
        out.push_back(c.finish());
    }
    return out;
}

inline std::vector<AnalyticTestFunction> fourier_test_functions()
{
    std::vector<AnalyticTestFunction> fs;
    AnalyticTestFunction a(1, 1.0);
    fs.push_back(a);
    AnalyticTestFunction b(1, 0.8);
    b.center = {0.3};
    fs.push_back(b);
    AnalyticTestFunction c(1, 1.2);
    c.center = {-0.4};
    c.poly = {{{}, 1.0}, {{2}, 0.5}};
    fs.push_back(c);
    AnalyticTestFunction d(1, 0.7);
    d.poly = {{{1}, cplx(1.0, 0.3)}, {{3}, -0.2}};
    fs.push_back(d);
    AnalyticTestFunction e(1, 1.5);
    e.center = {0.5};
    e.poly = {{{}, cplx(0.3, 0.2)}, {{1}, 1.0}, {{4}, 0.05}};
    fs.push_back(e);
    return fs;
}

inline std::vector<VerificationReport> fourier_n1(std::uint64_t seed)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 1);
    auto fs = fourier_test_functions();
    Rng rng(seed);
    Check inv("n=1 inversion", describe(p), 1e-8), par("n=1 parseval", describe(p), 1e-8),
        ref("n=1 self-reciprocal gaussian", describe(p), 1e-10);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        double x = uniform(rng, -1.0, 1.0);
        inv.add(inversion_residual(fs[i], {x}, p).value);
        par.add(parseval_residual(fs[i], fs[(i + 1) % fs.size()], p).value);
    }
    AnalyticTestFunction gauss(1, 1.0 / std::sqrt(pi));
    for (double l : {0.0, 0.4, 1.1})
        ref.add(std::abs(forward_t(gauss, {l}, p).value - std::exp(-pi * l * l)));
    return {inv.finish(), par.finish(), ref.finish()};
}

inline std::vector<VerificationReport> free_case(std::uint64_t seed, int pairs = 10)
{
    SystemParams p(Periods(1.0, 2.0), 2.0, 2);
    PsiOptions opt;
    opt.free_fast_path = false;
    WaveFunction wf(p, opt);
    Rng rng(seed);
    Check c("free case quadrature vs closed form", describe(p), 1e-6);
    for (int i = 0; i < pairs; ++i) {
        RealTuple lam{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
        PointTuple x{cplx(uniform(rng, -1.0, 1.0)), cplx(uniform(rng, -1.0, 1.0))};
        c.add(rel_err(wf(lam, x), psi_free(lam, x, p)));
    }
    return {c.finish()};
}

inline std::vector<VerificationReport> eigen(std::uint64_t seed)
{
    Rng rng(seed);
    RealTuple lam{uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)};
    PointTuple x{cplx(uniform(rng, -0.6, 0.6)), cplx(uniform(rng, -0.6, 0.6))};
    std::vector<double> gl{-0.3, 0.0, 0.37};
    std::vector<VerificationReport> out;
    SystemParams plain(Periods(1.0, 2.0), 0.8, 2);
    SystemParams conj(Periods(1.0, 2.0), 2.4, 2);
    for (auto [p, mode, name] : {std::tuple{plain, EigenMode::plain, "eigenvalue equations plain"},
                                 std::tuple{conj, EigenMode::eta_conjugated, "eigenvalue equations eta-conjugated"}}) {
        Check c(name, describe(p), 1e-6);
        auto r = eigen_residual(lam, x, p, mode, gl);
        for (double v : r.per_s)
            c.add(v);
        for (double v : r.generating)
            c.add(v);
        out.push_back(c.finish());
    }
    return out;
}

inline std::pair<AnalyticTestFunction, AnalyticTestFunction> pair_test_functions()
{
    AnalyticTestFunction a(2, 1.0);
    a.center = {0.3, -0.2};
    AnalyticTestFunction b(2, 0.9);
    b.center = {-0.1, 0.4};
    b.poly = {{{}, 1.0}, {{1}, cplx(0.2, 0.1)}};
    return {a, b};
}

inline std::vector<VerificationReport> symmetries(std::uint64_t seed)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 2);
    Rng rng(seed);
    RealTuple lam{uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)};
    PointTuple x{cplx(uniform(rng, -0.6, 0.6)), cplx(uniform(rng, -0.6, 0.6))};
    std::vector<VerificationReport> out;
    for (const auto& name : symmetry_names()) {
        Check c("symmetry " + name, describe(p), 1e-6);
        c.add(symmetry_residual(parse_symmetry(name), lam, x, p));
        out.push_back(c.finish());
    }
    {
        Check c("symmetry eigenvalue equations", describe(p), 1e-6);
        c.add(eigen_residual(lam, x, p, EigenMode::plain, {0.2}).max());
        out.push_back(c.finish());
    }
    {
        auto [a, b] = pair_test_functions();
        SystemParams pc(Periods(1.0, 2.0), 2.4, 2);
        Check c("symmetry of H under bilinear pairing", describe(p) + "; " + describe(pc) + " delta weight", 1e-6);
        for (auto [q, w] : {std::pair{p, Weight::mu}, std::pair{pc, Weight::delta}}) {
            auto pr = bilinear_h_pairings(a.as_func(), b.as_func(), 0.2, w, q,
                                          pairing_spec(a.truncation_radius(1e-12), 1e-9));
            c.add(rel_err(pr.first.value, pr.second.value));
        }
        out.push_back(c.finish());
    }
    return out;
}

inline std::vector<VerificationReport> regularized_pairing(std::uint64_t seed)
{
    std::vector<VerificationReport> out;
    Rng rng(seed);
    for (int n : {1, 2}) {
        SystemParams p(Periods(1.0, 2.0), 0.8, n);
        RealTuple x(n), y(n);
        for (int j = 0; j < n; ++j) {
            x[j] = uniform(rng, -0.6, 0.6);
            y[j] = uniform(rng, -0.6, 0.6);
        }
        Check c("regularized pairing numeric vs explicit", describe(p), n == 1 ? 1e-6 : 1e-4);
        std::unique_ptr<TwoBody> tb;
        if (n == 2)
            tb = std::make_unique<TwoBody>(p);
        for (double eps : {0.2, 0.1})
            for (double lr : {2.0, 5.0}) {
                RegularizerParams reg{lr, eps};
                auto num = regularized_pairing_numeric(reg, x, y, p, {}, 0.1, tb.get());
                c.add(rel_err(num.value, regularized_pairing_explicit(reg, x, y, p)));
            }
        out.push_back(c.finish());
    }
    return out;
}

inline std::vector<RegularizerParams> default_delta_schedule()
{
    return {{2.0, 0.05}, {5.0, 2e-3}, {10.0, 1e-4}, {20.0, 2e-6}};
}

inline std::vector<VerificationReport> delta(std::uint64_t seed)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 1);
    AnalyticTestFunction phi(1, 1.0);
    phi.center = {0.2};
    phi.poly = {{{}, 1.0}, {{2}, 0.3}};
    Rng rng(seed);
    Check fin("delta probe final step", describe(p), 1e-3);
    Check mono("delta probe monotone decrease", describe(p), 0.0);
    for (int i = 0; i < 3; ++i) {
        double x = uniform(rng, -0.8, 0.8);
        auto vals = delta_probe(phi, {x}, default_delta_schedule(), p);
        cplx target = phi(PointTuple{cplx(x)});
        double prev = INFINITY;
        double worst_increase = 0.0;
        for (cplx v : vals) {
            double e = rel_err(v, target);
            worst_increase = std::max(worst_increase, e - prev);
            prev = e;
        }
        fin.add(prev);
        mono.add(std::max(0.0, worst_increase));
    }
    return {fin.finish(), mono.finish()};
}

inline std::vector<VerificationReport> inversion_n2(std::uint64_t seed, double spacing = 0.05)
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 2);
    AnalyticTestFunction phi(2, 1.0);
    phi.center = {0.3, -0.2};
    phi.damping = 0.1;
    TransformSpec spec;
    spec.grid_spacing = spacing;
    TwoBody tb(p, spec.psi_tol);
    auto img = image_n2(phi, tb, spec);
    Rng rng(seed);
    Check c("n=2 inversion", describe(p), 1e-3);
    for (int i = 0; i < 3; ++i) {
        RealTuple x{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
        auto v = inverse_from_image(img, x, tb);
        auto r = make_residual(v.value, phi(to_points(x)), v.error_estimate);
        c.add(r.value);
        if (r.flagged)
            c.fail("grid error estimate exceeds tolerance");
    }
    return {c.finish()};
}

inline std::vector<VerificationReport> parseval_n2()
{
    SystemParams p(Periods(1.0, 2.0), 0.8, 2);
    auto [a, b] = pair_test_functions();
    Check c("n=2 parseval", describe(p), 1e-3);
    auto r = parseval_residual(a, b, p);
    c.add(r.value);
    if (r.flagged)
        c.fail("grid error estimate exceeds tolerance");
    return {c.finish()};
}

struct RegimeCase {
    SystemParams p;
    RegimeTag expected;
};

inline std::vector<RegimeCase> regime_cases()
{
    return {
        {SystemParams(Periods(1.0, 2.0), 0.8, 2), RegimeTag::I},
        {SystemParams(Periods(1.0, 2.0), 0.5, 2), RegimeTag::I},
        {SystemParams(Periods(cplx(1.0, 0.5), cplx(1.0, -0.5)), 0.8, 2), RegimeTag::II},
        {SystemParams(Periods(cplx(1.0, 1.0), cplx(1.0, -1.0)), 1.0, 2), RegimeTag::II},
        {SystemParams(Periods(1.0, 2.0), cplx(1.5, 0.3), 2), RegimeTag::III},
        {SystemParams(Periods(1.0, 2.0), cplx(1.5, 1.0), 2), RegimeTag::III},
        {SystemParams(Periods(cplx(1.0, 0.5), cplx(1.0, -0.5)), cplx(1.0, 0.3), 2), RegimeTag::IV},
        {SystemParams(Periods(1.0, 2.0), cplx(0.8, 0.3), 2), RegimeTag::None},
    };
}

// The four parameter sets used for the n = 2 regime checks.
inline std::vector<SystemParams> regime_representatives(int n = 2)
{
    return {SystemParams(Periods(1.0, 2.0), 0.8, n), SystemParams(Periods(cplx(1.0, 0.5), cplx(1.0, -0.5)), 0.8, n),
            SystemParams(Periods(1.0, 2.0), cplx(1.5, 0.3), n),
            SystemParams(Periods(cplx(1.0, 0.5), cplx(1.0, -0.5)), cplx(1.0, 0.3), n)};
}

inline std::vector<VerificationReport> regimes(std::uint64_t seed, bool include_u2_n2 = true)
{
    std::vector<VerificationReport> out;
    {
        Check c("regime classification", "8 parameter sets", 0.0);
        for (const auto& rc : regime_cases()) {
            auto tag = classify_regime(rc.p).tag;
            c.add(tag == rc.expected ? 0.0 : 1.0);
            if (tag != rc.expected)
                c.note(describe(rc.p) + " classified " + to_string(tag));
        }
        out.push_back(c.finish());
    }
    Rng rng(seed);
    for (const auto& p : regime_representatives()) {
        auto r = classify_regime(p);
        std::string ps = describe(p) + " regime " + to_string(r.tag);
        if (r.spatial_mu()) {
            Check c("measure positivity mu", ps, 1e-12);
            for (int i = 0; i < 20; ++i) {
                PointTuple x{cplx(uniform(rng, -2.0, 2.0)), cplx(uniform(rng, -2.0, 2.0))};
                cplx m = mu_multi(x, p);
                c.add(std::max(0.0, -m.real()) + std::abs(m.imag()) / std::max(std::abs(m), 1e-300));
            }
            out.push_back(c.finish());
        } else {
            Check c("measure positivity delta and unit eta", ps, 1e-12);
            for (int i = 0; i < 20; ++i) {
                PointTuple x{cplx(uniform(rng, -2.0, 2.0)), cplx(uniform(rng, -2.0, 2.0))};
                cplx d = delta_measure(x, p);
                c.add(std::max(0.0, -d.real()) + std::abs(d.imag()) / std::max(std::abs(d), 1e-300));
                c.add(std::abs(std::abs(eta(x, p)) - 1.0));
            }
            out.push_back(c.finish());
        }
    }
    auto [a, b] = pair_test_functions();
    for (const auto& p : regime_representatives()) {
        auto r = classify_regime(p);
        std::string ps = describe(p) + " regime " + to_string(r.tag);
        Check c("H adjointness under scalar product", ps, 1e-6);
        Weight w = r.spatial_mu() ? Weight::mu : Weight::delta;
        bool swap = r.tag == RegimeTag::II || r.tag == RegimeTag::IV;
        auto pr = sesquilinear_h_pairings(a.as_func(), b.as_func(), 0.2, w, p, swap,
                                          pairing_spec(a.truncation_radius(1e-12), 1e-9));
        c.add(rel_err(pr.first.value, pr.second.value));
        out.push_back(c.finish());
    }
    for (const auto& p : regime_representatives()) {
        std::string ps = describe(p) + " regime " + to_string(classify_regime(p).tag);
        Check c("n=2 isometry", ps, 1e-3);
        auto r = isometry_residual(a, b, p);
        c.add(r.value);
        if (r.flagged)
            c.fail("grid error estimate exceeds tolerance");
        out.push_back(c.finish());
    }
    {
        SystemParams p1(Periods(1.0, 2.0), 0.8, 1);
        Check c("n=1 U^2 = R", describe(p1), 1e-8);
        for (const auto& f : fourier_test_functions())
            c.add(u_squared_residual(f, {uniform(rng, -1.0, 1.0)}, p1).value);
        out.push_back(c.finish());
    }
    if (include_u2_n2) {
        SystemParams p(Periods(1.0, 2.0), 0.8, 2);
        TransformSpec spec;
        spec.grid_spacing = 0.1;
        Check c("n=2 U^2 = R", describe(p), 1e-3);
        RealTuple x{uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
        auto r = u_squared_residual(a, x, p, spec);
        c.add(r.value);
        if (r.flagged)
            c.fail("grid error estimate exceeds tolerance");
        out.push_back(c.finish());
    }
    return out;
}

inline std::vector<VerificationReport> measure_shift(std::uint64_t seed, int points = 20)
{
    std::vector<VerificationReport> out;
    Rng rng(seed);
    for (const auto& [p, w, name] :
         {std::tuple{SystemParams(Periods(1.0, 2.0), 0.8, 2), Weight::mu, "mu difference equations"},
          std::tuple{SystemParams(Periods(cplx(1.0, 0.5), cplx(1.0, -0.5)), 0.8, 2), Weight::mu,
                     "mu difference equations"},
          std::tuple{SystemParams(Periods(1.0, 2.0), cplx(1.5, 0.3), 2), Weight::delta, "delta difference equations"}}) {
        Check c(name, describe(p), 1e-10);
        for (int i = 0; i < points; ++i) {
            PointTuple y{cplx(uniform(rng, -1.5, 1.5)), cplx(uniform(rng, -1.5, 1.5))};
            for (unsigned m = 0; m < 4; ++m)
                c.add(measure_shift_residual(y, m, p, w));
        }
        out.push_back(c.finish());
    }
    return out;
}

inline std::vector<VerificationReport> regime34(std::uint64_t seed)
{
    SystemParams p(Periods(1.0, 2.0), cplx(1.5, 0.3), 1);
    RegularizerParams reg{2.0, 0.2};
    Rng rng(seed);
    Check c("regime III regularized scalar product", describe(p), 1e-4);
    for (int i = 0; i < 3; ++i) {
        RealTuple x{uniform(rng, -0.6, 0.6)}, y{uniform(rng, -0.6, 0.6)};
        auto num = regime34_scalar_numeric(reg, x, y, p);
        auto ex = regime34_scalar_explicit(reg, x, y, p);
        c.add(rel_err(num.value, ex.value));
        if (!ex.warning.empty())
            c.note(ex.warning);
    }
    return {c.finish()};
}

} // namespace suites

struct SuiteInfo {
    std::string name;
    std::string description;
    std::function<std::vector<VerificationReport>(std::uint64_t)> run;
};

inline const std::vector<SuiteInfo>& suite_registry()
{
    static const std::vector<SuiteInfo> reg = {
        {"s2", "double sine functional equations", [](std::uint64_t s) { return suites::s2_equations(s); }},
        {"s2-values", "double sine special values", [](std::uint64_t) { return suites::s2_values(); }},
        {"s2-homogeneity", "homogeneity and period swap", [](std::uint64_t s) { return suites::s2_homogeneity(s); }},
        {"s2-asymptotics", "double sine asymptotics", [](std::uint64_t) { return suites::s2_asymptotics(); }},
        {"fourier", "n=1 transform is the Fourier transform", [](std::uint64_t s) { return suites::fourier_n1(s); }},
        {"free", "free-case wave function", [](std::uint64_t s) { return suites::free_case(s); }},
        {"eigen", "eigenvalue equations", [](std::uint64_t s) { return suites::eigen(s); }},
        {"symmetries", "wave-function symmetries", [](std::uint64_t s) { return suites::symmetries(s); }},
        {"regularized-pairing", "regularized pairing numeric vs explicit",
         [](std::uint64_t s) { return suites::regularized_pairing(s); }},
        {"delta", "delta-sequence probe", [](std::uint64_t s) { return suites::delta(s); }},
        {"inversion", "n=2 inversion", [](std::uint64_t s) { return suites::inversion_n2(s); }},
        {"parseval", "n=2 Parseval", [](std::uint64_t) { return suites::parseval_n2(); }},
        {"regimes", "unitarity regimes", [](std::uint64_t s) { return suites::regimes(s); }},
        {"measure-shift", "measure difference equations", [](std::uint64_t s) { return suites::measure_shift(s); }},
        {"regime34", "regime III regularized scalar product", [](std::uint64_t s) { return suites::regime34(s); }},
    };
    return reg;
}

inline SuiteResult run_suite(const std::string& name, std::uint64_t seed)
{
    for (const auto& s : suite_registry())
        if (s.name == name) {
            auto t0 = std::chrono::steady_clock::now();
            SuiteResult r{name, s.run(seed), 0.0};
            r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return r;
        }
    throw Error("unknown suite: " + name);
}

} // namespace rsr
