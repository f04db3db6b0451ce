#pragma once

#include <cmath>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rsr/hamiltonian.hpp"
#include "rsr/params.hpp"
#include "rsr/verify.hpp"

namespace rsr {

using json = nlohmann::ordered_json;

inline json cplx_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from_json(const json& j)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw Error("complex values must be numbers or [re, im] pairs");
}

inline json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline SystemParams params_from_json(const json& j)
{
    for (const char* k : {"omega1", "omega2", "g", "n"})
        if (!j.contains(k))
            throw Error(std::string("params file is missing field '") + k + "'");
    return SystemParams(Periods(cplx_from_json(j.at("omega1")), cplx_from_json(j.at("omega2"))),
                        cplx_from_json(j.at("g")), j.at("n").get<int>());
}

inline json params_to_json(const SystemParams& p)
{
    return json{{"omega1", cplx_to_json(p.w.w1)},
                {"omega2", cplx_to_json(p.w.w2)},
                {"g", cplx_to_json(p.g)},
                {"n", p.n}};
}

// {"n": 2, "width": 1, "center": [..], "damping": 0, "poly": [{"alpha": [1], "c": [re, im]}]}
inline AnalyticTestFunction test_function_from_json(const json& j)
{
    int n = j.value("n", 1);
    AnalyticTestFunction f(n, j.value("width", 1.0));
    if (j.contains("center"))
        f.center = j.at("center").get<RealTuple>();
    if (static_cast<int>(f.center.size()) != n)
        throw Error("test function center must have n entries");
    f.damping = j.value("damping", 0.0);
    if (j.contains("poly")) {
        f.poly.clear();
        for (const auto& t : j.at("poly"))
            f.poly[t.value("alpha", std::vector<int>{})] += cplx_from_json(t.at("c"));
    }
    return f;
}

inline json to_json(const VerificationReport& r, bool with_time = true)
{
    json j{{"check", r.check},
           {"params", r.params},
           {"probes", r.probes},
           {"max_residual", real_or_null(r.max_residual)},
           {"tolerance", r.tolerance},
           {"pass", r.pass}};
    if (with_time)
        j["wall_time"] = r.wall_time;
    if (!r.note.empty())
        j["note"] = r.note;
    return j;
}

inline json to_json(const std::vector<SuiteResult>& results, std::uint64_t seed, bool with_time = true)
{
    json suites = json::array();
    bool all = true;
    for (const auto& s : results) {
        json reps = json::array();
        for (const auto& r : s.reports)
            reps.push_back(to_json(r, with_time));
        json js{{"suite", s.suite}, {"pass", s.pass()}, {"reports", reps}};
        if (with_time)
            js["wall_time"] = s.wall_time;
        suites.push_back(js);
        all = all && s.pass();
    }
    return json{{"schema", 1}, {"seed", seed}, {"pass", all}, {"suites", suites}};
}

inline std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

inline std::string fmt_double(double v)
{
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::string to_csv(const std::vector<SuiteResult>& results)
{
    std::ostringstream os;
    os << "suite,check,params,probes,max_residual,tolerance,pass,wall_time\n";
    for (const auto& s : results)
        for (const auto& r : s.reports)
            os << csv_escape(s.suite) << ',' << csv_escape(r.check) << ',' << csv_escape(r.params) << ','
               << r.probes << ',' << fmt_double(r.max_residual) << ',' << fmt_double(r.tolerance) << ','
               << (r.pass ? "true" : "false") << ',' << fmt_double(r.wall_time) << '\n';
    return os.str();
}

inline std::string to_pretty(const std::vector<SuiteResult>& results)
{
    std::ostringstream os;
    for (const auto& s : results) {
        os << s.suite << ": " << (s.pass() ? "PASS" : "FAIL") << '\n';
        for (const auto& r : s.reports)
            os << "  " << (r.pass ? "ok  " : "FAIL") << ' ' << r.check << "  " << std::scientific
               << std::setprecision(3) << r.max_residual << " <= " << r.tolerance << std::defaultfloat << "  ["
               << r.params << "]" << (r.note.empty() ? "" : "  " + r.note) << '\n';
    }
    return os.str();
}

} // namespace rsr
