#include <cstdio>
#include <string>
#include <vector>

#include "rsr/verify.hpp"

using namespace rsr;

namespace {

struct Criterion {
    int id;
    std::string suite;
    std::string title;
    double budget_s;
};

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> c = {
        {1, "s2", "double sine functional equations", 30},
        {2, "s2-values", "double sine special values", 1},
        {3, "s2-homogeneity", "homogeneity and period swap", 10},
        {4, "s2-asymptotics", "double sine asymptotics", 10},
        {5, "fourier", "n=1 transform is Fourier", 10},
        {6, "free", "free-case wave function", 120},
        {7, "eigen", "eigenvalue equations", 300},
        {8, "symmetries", "wave-function symmetries", 600},
        {9, "regularized-pairing", "regularized pairing", 600},
        {10, "delta", "delta-sequence probe", 120},
        {11, "inversion", "n=2 inversion", 3600},
        {12, "parseval", "n=2 Parseval", 1800},
        {13, "regimes", "unitarity regimes", 2700},
        {14, "measure-shift", "measure difference equations", 60},
        {15, "regime34", "regime III regularized scalar product", 300},
    };
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    std::setvbuf(stdout, nullptr, _IOLBF, 0);
    std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 20240601;
    int failed = 0;
    for (const auto& c : criteria()) {
        bool ok = false;
        std::string detail;
        double t = 0.0;
        try {
            auto r = run_suite(c.suite, seed);
            t = r.wall_time;
            ok = r.pass() && t <= c.budget_s;
            char buf[160];
            std::snprintf(buf, sizeof buf, "worst residual/tolerance %.3g, %.1f s of %.0f s", r.worst_ratio(), t,
                          c.budget_s);
            detail = buf;
            for (const auto& rep : r.reports)
                if (!rep.pass)
                    detail += "; failed: " + rep.check + " [" + rep.params + "] " + rep.note;
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%2d] %s %-40s %s\n", c.id, ok ? "PASS" : "FAIL", c.title.c_str(), detail.c_str());
        failed += ok ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria().size()) - failed, criteria().size());
    return failed == 0 ? 0 : 1;
}
