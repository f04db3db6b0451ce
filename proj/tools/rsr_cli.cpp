#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rsr/double_sine.hpp"
#include "rsr/hamiltonian.hpp"
#include "rsr/measures.hpp"
#include "rsr/parallel.hpp"
#include "rsr/report.hpp"
#include "rsr/transform.hpp"
#include "rsr/verify.hpp"
#include "rsr/wavefunction.hpp"

namespace {

using namespace rsr;

struct UsageError : Error {
    using Error::Error;
};

cplx parse_cplx(const std::string& s)
{
    std::vector<double> v;
    std::stringstream ss(s);
    ss.imbue(std::locale::classic());
    std::string tok;
    while (std::getline(ss, tok, ','))
        v.push_back(std::stod(tok));
    if (v.size() == 1)
        return {v[0], 0.0};
    if (v.size() == 2)
        return {v[0], v[1]};
    throw UsageError("complex argument must be 're' or 're,im': " + s);
}

RealTuple parse_list(const std::string& s)
{
    RealTuple v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        v.push_back(std::stod(tok));
    if (v.empty())
        throw UsageError("empty list argument");
    return v;
}

json read_json_arg(const std::string& arg)
{
    if (!arg.empty() && (arg.front() == '{' || arg.front() == '['))
        return json::parse(arg);
    std::ifstream in(arg);
    if (!in)
        throw UsageError("cannot open " + arg);
    return json::parse(in);
}

SystemParams load_params(const std::string& path)
{
    if (path.empty())
        throw UsageError("--params is required");
    return params_from_json(read_json_arg(path));
}

void require_size(const RealTuple& v, int n, const char* what)
{
    if (static_cast<int>(v.size()) != n)
        throw UsageError(std::string(what) + " must have n = " + std::to_string(n) + " entries");
}

struct Output {
    std::string format = "json";
    std::string csv_path;
};

int emit_reports(const std::vector<SuiteResult>& results, std::uint64_t seed, const Output& out,
                 std::optional<double> tol)
{
    std::vector<SuiteResult> rs = results;
    if (tol)
        for (auto& s : rs)
            for (auto& r : s.reports) {
                r.tolerance = *tol;
                r.pass = std::isfinite(r.max_residual) && r.max_residual <= *tol;
            }
    if (out.format == "csv")
        std::cout << to_csv(rs);
    else if (out.format == "pretty")
        std::cout << to_pretty(rs);
    else
        std::cout << to_json(rs, seed).dump(2) << '\n';
    if (!out.csv_path.empty()) {
        std::ofstream f(out.csv_path);
        f << to_csv(rs);
    }
    bool ok = true;
    for (const auto& s : rs)
        ok = ok && s.pass();
    return ok ? 0 : 1;
}

int emit_value(json j, const Output& out)
{
    json r{{"schema", 1}};
    r.update(j);
    j = r;
    if (out.format == "pretty") {
        for (auto& [k, v] : j.items())
            std::cout << k << ": " << v.dump() << '\n';
    } else {
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

SuiteResult single(const std::string& name, std::vector<VerificationReport> reps)
{
    SuiteResult s{name, std::move(reps), 0.0};
    for (const auto& r : s.reports)
        s.wall_time += r.wall_time;
    return s;
}

std::vector<VerificationReport> transform_check(const std::string& check, int n, std::uint64_t seed,
                                                const std::optional<SystemParams>& given, double spacing)
{
    using namespace suites;
    auto pick = [](std::vector<VerificationReport> v, const std::string& key) {
        std::vector<VerificationReport> out;
        for (auto& r : v)
            if (r.check.find(key) != std::string::npos)
                out.push_back(r);
        return out;
    };
    auto [a, b] = pair_test_functions();
    if (check == "inversion")
        return n == 1 ? pick(fourier_n1(seed), "inversion") : inversion_n2(seed, spacing);
    if (check == "parseval")
        return n == 1 ? pick(fourier_n1(seed), "parseval") : parseval_n2();
    if (check == "delta") {
        if (n != 1)
            throw UsageError("delta probe is implemented for n = 1");
        return delta(seed);
    }
    if (check == "regularized-pairing") {
        auto v = regularized_pairing(seed);
        return {v.at(n == 1 ? 0 : 1)};
    }
    if (check == "regime-isometry" || check == "u-squared") {
        std::vector<SystemParams> ps;
        if (given)
            ps.push_back(given->with_n(n));
        else
            ps = regime_representatives(n);
        std::vector<VerificationReport> out;
        Rng rng(seed);
        for (const auto& p : ps) {
            require_regime(p);
            std::string d = describe(p) + " regime " + to_string(classify_regime(p).tag);
            TransformSpec spec;
            spec.grid_spacing = spacing;
            if (check == "regime-isometry") {
                Check c("isometry", d, n == 1 ? 1e-8 : 1e-3);
                auto r = n == 1 ? isometry_residual(fourier_test_functions()[1], fourier_test_functions()[2], p, spec)
                                : isometry_residual(a, b, p, spec);
                c.add(r.value);
                out.push_back(c.finish());
            } else {
                Check c("U^2 = R", d, n == 1 ? 1e-8 : 1e-3);
                RealTuple x(n);
                for (auto& v : x)
                    v = uniform(rng, -1.0, 1.0);
                auto r = u_squared_residual(n == 1 ? fourier_test_functions()[0] : a, x, p, spec);
                c.add(r.value);
                out.push_back(c.finish());
            }
        }
        return out;
    }
    throw UsageError("unknown transform check: " + check);
}

std::vector<VerificationReport> ham_check(const std::string& check, const SystemParams& p, std::uint64_t seed)
{
    suites::Rng rng(seed);
    auto rnd = [&](int n, double s) {
        PointTuple x(n);
        for (auto& v : x)
            v = suites::uniform(rng, -s, s);
        return x;
    };
    std::string d = describe(p);
    AnalyticTestFunction f(p.n, 1.0);
    for (int j = 0; j < p.n; ++j)
        f.center[j] = 0.1 * (j + 1) - 0.15;
    if (check == "eigen") {
        Check c("eigenvalue equations", d, 1e-6);
        bool conj = p.g.real() >= p.w.w2.real();
        RealTuple lam(p.n);
        for (auto& v : lam)
            v = suites::uniform(rng, -0.5, 0.5);
        auto r = eigen_residual(lam, rnd(p.n, 0.6), p, conj ? EigenMode::eta_conjugated : EigenMode::plain,
                                {-0.3, 0.0, 0.37});
        for (double v : r.per_s)
            c.add(v);
        for (double v : r.generating)
            c.add(v);
        return {c.finish()};
    }
    if (check == "pairing") {
        Check c("H symmetry under bilinear pairing", d, 1e-6);
        AnalyticTestFunction g = f;
        g.width = 0.9;
        g.poly = {{{}, 1.0}, {{1}, cplx(0.2, 0.1)}};
        auto pr = bilinear_h_pairings(f.as_func(), g.as_func(), 0.2, Weight::mu, p,
                                      pairing_spec(f.truncation_radius(1e-12), 1e-9));
        c.add(rel_err(pr.first.value, pr.second.value));
        return {c.finish()};
    }
    if (check == "commute") {
        Check c("H_s commute", d, 1e-9);
        for (int i = 0; i < 10; ++i)
            for (int s = 1; s <= p.n; ++s)
                for (int t = s + 1; t <= p.n; ++t)
                    c.add(commute_residual(s, t, f.as_func(), rnd(p.n, 1.0), p));
        if (p.n < 2) {
            c.add(0.0);
            c.note("n = 1 has a single operator");
        }
        return {c.finish()};
    }
    if (check == "similarity") {
        Check c("eta similarity to reflected coupling", d, 1e-9);
        for (int i = 0; i < 10; ++i)
            c.add(similarity_residual(suites::uniform(rng, -1.0, 1.0), f.as_func(), rnd(p.n, 1.0), p));
        return {c.finish()};
    }
    if (check == "measure-shift") {
        auto r = classify_regime(p);
        Weight w = r.spatial_delta() ? Weight::delta : Weight::mu;
        Check c(w == Weight::mu ? "mu difference equations" : "delta difference equations", d, 1e-10);
        for (int i = 0; i < 20; ++i) {
            auto y = rnd(p.n, 1.5);
            for (unsigned m = 0; m < (1u << p.n); ++m)
                c.add(measure_shift_residual(y, m, p, w));
        }
        return {c.finish()};
    }
    throw UsageError("unknown ham check: " + check);
}

struct TabRow {
    cplx arg;
    cplx value;
    double err = 0.0;
    std::string flag;
};

std::string tabulate(const std::string& kind, double from, double to, int points, const std::optional<SystemParams>& p,
                     const Periods& w, const RealTuple& lam, const RealTuple& base, int axis)
{
    if (points < 1)
        throw UsageError("--points must be positive");
    std::vector<TabRow> rows(points);
    parallel_for(points, [&](std::size_t i) {
        double t = points == 1 ? from : from + (to - from) * static_cast<double>(i) / (points - 1);
        TabRow& r = rows[i];
        r.arg = t;
        try {
            if (kind == "s2") {
                auto e = s2_detailed(t, w);
                r.value = e.value;
                r.err = e.error_estimate;
            } else if (kind == "mu") {
                r.value = mu_scalar(t, *p);
            } else if (kind == "delta") {
                r.value = delta_measure(PointTuple{cplx(t), cplx(0.0)}, p->with_n(2));
            } else if (kind == "psi") {
                PointTuple x = to_points(base);
                x.at(axis) = t;
                WaveFunction wf(*p);
                auto e = wf.eval(lam, x);
                r.value = e.value;
                r.err = e.error_estimate;
                if (!e.converged)
                    r.flag = "not_converged";
            } else {
                throw UsageError("unknown tabulation kind: " + kind);
            }
            if (!std::isfinite(r.value.real()) || !std::isfinite(r.value.imag()))
                r.flag = "non_finite";
        } catch (const PoleError&) {
            r.value = cplx(NAN, NAN);
            r.flag = "pole";
        }
    });
    std::ostringstream os;
    os << "arg_re,arg_im,value_re,value_im,error_estimate,flag\n";
    for (const auto& r : rows)
        os << fmt_double(r.arg.real()) << ',' << fmt_double(r.arg.imag()) << ',' << fmt_double(r.value.real()) << ','
           << fmt_double(r.value.imag()) << ',' << fmt_double(r.err) << ',' << r.flag << '\n';
    return os.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ruijsenaars spectral transform toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Output out;
    std::string params_path;
    std::uint64_t seed = 1;
    std::optional<double> tol_override;
    app.add_option("--format", out.format, "json, csv or pretty")
        ->check(CLI::IsMember({"json", "csv", "pretty"}));
    app.add_option("--csv", out.csv_path, "also write the report table to this CSV file");
    app.add_option("--seed", seed, "seed for random probe points");
    app.add_option("--params", params_path, "JSON parameter file or inline JSON");
    app.add_option("--tolerance", tol_override, "override the per-check tolerance");

    // s2
    auto* s2c = app.add_subcommand("s2", "double sine function");
    auto* s2e = s2c->add_subcommand("eval", "evaluate S2(z | w1, w2)");
    std::string zs, w1s = "1", w2s = "1", route = "auto";
    s2e->add_option("--z", zs, "re,im")->required();
    s2e->add_option("--omega1", w1s, "re,im");
    s2e->add_option("--omega2", w2s, "re,im");
    s2e->add_option("--route", route)->check(CLI::IsMember({"auto", "w1", "w2"}));
    s2c->require_subcommand(1);

    // measure
    auto* mc = app.add_subcommand("measure", "measure functions");
    auto* me = mc->add_subcommand("eval", "evaluate a measure");
    std::string mkind, xs;
    me->add_option("--kind", mkind)->required()->check(CLI::IsMember({"mu", "delta", "eta", "muhat", "K"}));
    me->add_option("--x", xs, "comma-separated coordinates")->required();
    mc->require_subcommand(1);

    // wavefn
    auto* wc = app.add_subcommand("wavefn", "wave functions");
    auto* we = wc->add_subcommand("eval", "evaluate Psi_lambda(x)");
    auto* wk = wc->add_subcommand("check", "symmetry residual");
    auto* wg = wc->add_subcommand("grid", "tabulate Psi along one coordinate as CSV");
    std::string lams, sym;
    double alpha = 0.37, rel_tol = 1e-10, from = -1.0, to = 1.0;
    int points = 21, axis = 0;
    bool no_fast = false;
    for (auto* sc : {we, wk, wg}) {
        sc->add_option("--lambda", lams, "comma-separated spectral variables")->required();
        sc->add_option("--x", xs, "comma-separated coordinates")->required();
    }
    we->add_option("--rel-tol", rel_tol);
    we->add_flag("--no-free-fast-path", no_fast);
    wk->add_option("--symmetry", sym)->required()->check(CLI::IsMember(symmetry_names()));
    wk->add_option("--alpha", alpha, "shift used by the shift relation");
    wg->add_option("--from", from);
    wg->add_option("--to", to);
    wg->add_option("--points", points);
    wg->add_option("--axis", axis, "coordinate index varied along the grid");
    wc->require_subcommand(1);

    // ham
    auto* hc = app.add_subcommand("ham", "Hamiltonians");
    auto* ha = hc->add_subcommand("apply", "apply H_s or H(lambda) to a test function");
    auto* hv = hc->add_subcommand("verify", "operator identities");
    std::string phis, hcheck;
    std::optional<int> hs;
    std::optional<double> hl;
    ha->add_option("--phi", phis, "test function JSON (file or inline)")->required();
    ha->add_option("--x", xs)->required();
    auto* hso = ha->add_option("--s", hs);
    auto* hlo = ha->add_option("--lambda", hl);
    hso->excludes(hlo);
    hv->add_option("--check", hcheck)
        ->required()
        ->check(CLI::IsMember({"eigen", "pairing", "commute", "similarity", "measure-shift"}));
    hc->require_subcommand(1);

    // transform
    auto* tc = app.add_subcommand("transform", "spectral transforms");
    auto* tf = tc->add_subcommand("forward", "[T phi](lambda)");
    auto* ti = tc->add_subcommand("inverse", "T^{-1} T phi at x");
    auto* tv = tc->add_subcommand("verify", "transform identities");
    std::string grid = "0.05", tcheck;
    int tn = 1;
    for (auto* sc : {tf, ti}) {
        sc->add_option("--phi", phis, "test function JSON (file or inline)")->required();
        sc->add_option("--grid", grid, "spacing[,radius]");
    }
    tf->add_option("--lambda", lams)->required();
    ti->add_option("--x", xs)->required();
    tv->add_option("--check", tcheck)
        ->required()
        ->check(CLI::IsMember({"inversion", "parseval", "delta", "regime-isometry", "u-squared",
                               "regularized-pairing"}));
    tv->add_option("--n", tn)->check(CLI::IsMember({1, 2}));
    tv->add_option("--grid", grid, "spacing");
    tc->require_subcommand(1);

    // verify
    auto* vc = app.add_subcommand("verify", "run acceptance suites");
    std::vector<std::string> suite_names;
    vc->add_option("--suite", suite_names, "suite name or 'all'")->required();

    // tabulate
    auto* tb = app.add_subcommand("tabulate", "CSV tables");
    std::string tkind;
    tb->add_option("--kind", tkind)->required()->check(CLI::IsMember({"s2", "mu", "delta", "psi"}));
    tb->add_option("--from", from);
    tb->add_option("--to", to);
    tb->add_option("--points", points);
    tb->add_option("--omega1", w1s);
    tb->add_option("--omega2", w2s);
    tb->add_option("--lambda", lams);
    tb->add_option("--x", xs, "base point for psi");
    tb->add_option("--axis", axis);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        auto params = [&] { return load_params(params_path); };
        auto maybe_params = [&]() -> std::optional<SystemParams> {
            if (params_path.empty())
                return std::nullopt;
            return load_params(params_path);
        };

        if (s2e->parsed()) {
            Periods w(parse_cplx(w1s), parse_cplx(w2s));
            w.validate();
            cplx z = parse_cplx(zs);
            Route r = route == "w1" ? Route::via_w1 : route == "w2" ? Route::via_w2 : Route::automatic;
            auto e = s2_detailed(z, w, r);
            return emit_value({{"command", "s2 eval"},
                               {"z", cplx_to_json(z)},
                               {"omega1", cplx_to_json(w.w1)},
                               {"omega2", cplx_to_json(w.w2)},
                               {"value", cplx_to_json(e.value)},
                               {"error_estimate", e.error_estimate},
                               {"is_zero", e.is_zero}},
                              out);
        }
        if (me->parsed()) {
            auto p = params();
            auto v = parse_list(xs);
            cplx val;
            if (mkind == "K") {
                require_size(v, 1, "--x");
                val = kernel_k(v[0], p);
            } else {
                require_size(v, p.n, "--x");
                auto x = to_points(v);
                val = mkind == "mu"      ? mu_multi(x, p)
                      : mkind == "delta" ? delta_measure(x, p)
                      : mkind == "eta"   ? eta(x, p)
                                         : mu_hat(x, p);
            }
            return emit_value({{"command", "measure eval"},
                               {"kind", mkind},
                               {"x", v},
                               {"params", params_to_json(p)},
                               {"value", cplx_to_json(val)}},
                              out);
        }
        if (we->parsed() || wk->parsed() || wg->parsed()) {
            auto p = params();
            auto lam = parse_list(lams);
            auto x = parse_list(xs);
            require_size(lam, p.n, "--lambda");
            require_size(x, p.n, "--x");
            if (we->parsed()) {
                PsiOptions opt;
                opt.rel_tol = rel_tol;
                opt.free_fast_path = !no_fast;
                WaveFunction wf(p, opt);
                auto e = wf.eval(lam, to_points(x));
                return emit_value({{"command", "wavefn eval"},
                                   {"lambda", lam},
                                   {"x", x},
                                   {"params", params_to_json(p)},
                                   {"value", cplx_to_json(e.value)},
                                   {"error_estimate", e.error_estimate},
                                   {"converged", e.converged}},
                                  out);
            }
            if (wk->parsed()) {
                Check c("symmetry " + sym, describe(p), 1e-6);
                c.add(symmetry_residual(parse_symmetry(sym), lam, to_points(x), p, {}, alpha));
                return emit_reports({single("wavefn check", {c.finish()})}, seed, out, tol_override);
            }
            if (axis < 0 || axis >= p.n)
                throw UsageError("--axis out of range");
            std::cout << tabulate("psi", from, to, points, p, p.w, lam, x, axis);
            return 0;
        }
        if (ha->parsed()) {
            auto p = params();
            auto f = test_function_from_json(read_json_arg(phis));
            if (f.n != p.n)
                throw UsageError("test function n differs from params n");
            auto x = parse_list(xs);
            require_size(x, p.n, "--x");
            if (!hs && !hl)
                throw UsageError("one of --s or --lambda is required");
            cplx v = hs ? apply_h_s(*hs, f.as_func(), to_points(x), p) : apply_h_gen(*hl, f.as_func(), to_points(x), p);
            json j{{"command", "ham apply"}, {"x", x}, {"params", params_to_json(p)}};
            if (hs)
                j["s"] = *hs;
            else
                j["lambda"] = *hl;
            j["value"] = cplx_to_json(v);
            return emit_value(j, out);
        }
        if (hv->parsed())
            return emit_reports({single("ham " + hcheck, ham_check(hcheck, params(), seed))}, seed, out,
                                tol_override);
        if (tf->parsed() || ti->parsed()) {
            auto p = params();
            auto f = test_function_from_json(read_json_arg(phis));
            if (f.n != p.n)
                throw UsageError("test function n differs from params n");
            auto g = parse_list(grid);
            TransformSpec spec;
            spec.grid_spacing = g.at(0);
            if (g.size() > 1)
                spec.lambda_cap = g[1];
            if (tf->parsed()) {
                auto lam = parse_list(lams);
                require_size(lam, p.n, "--lambda");
                auto v = forward_t(f, lam, p, spec);
                return emit_value({{"command", "transform forward"},
                                   {"lambda", lam},
                                   {"params", params_to_json(p)},
                                   {"value", cplx_to_json(v.value)},
                                   {"error_estimate", v.error_estimate},
                                   {"converged", v.converged}},
                                  out);
            }
            auto x = parse_list(xs);
            require_size(x, p.n, "--x");
            auto r = inversion_residual(f, x, p, spec);
            return emit_value({{"command", "transform inverse"},
                               {"x", x},
                               {"params", params_to_json(p)},
                               {"value", cplx_to_json(r.lhs)},
                               {"phi", cplx_to_json(r.rhs)},
                               {"residual", r.value},
                               {"error_estimate", r.error_estimate}},
                              out);
        }
        if (tv->parsed()) {
            double spacing = parse_list(grid).at(0);
            auto reps = transform_check(tcheck, tn, seed, maybe_params(), spacing);
            return emit_reports({single("transform " + tcheck, reps)}, seed, out, tol_override);
        }
        if (vc->parsed()) {
            std::vector<std::string> names;
            for (const auto& s : suite_names)
                if (s == "all")
                    for (const auto& info : suite_registry())
                        names.push_back(info.name);
                else
                    names.push_back(s);
            std::vector<SuiteResult> results;
            for (const auto& n : names)
                results.push_back(run_suite(n, seed));
            return emit_reports(results, seed, out, tol_override);
        }
        if (tb->parsed()) {
            Periods w(parse_cplx(w1s), parse_cplx(w2s));
            auto mp = maybe_params();
            if (tkind == "s2") {
                if (mp)
                    w = mp->w;
                w.validate();
            } else if (!mp) {
                throw UsageError("--params is required for " + tkind);
            }
            RealTuple lam, base;
            if (tkind == "psi") {
                lam = parse_list(lams);
                base = parse_list(xs);
                require_size(lam, mp->n, "--lambda");
                require_size(base, mp->n, "--x");
                if (axis < 0 || axis >= mp->n)
                    throw UsageError("--axis out of range");
            }
            std::cout << tabulate(tkind, from, to, points, mp, w, lam, base, axis);
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "invalid JSON: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid number: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
