#include <sstream>

#include <gtest/gtest.h>

#include "rsr/report.hpp"

using namespace rsr;

namespace {

std::vector<SuiteResult> sample()
{
    VerificationReport a{"s2 reflection", "w1=1 w2=2, n=1", 100, 3e-15, 1e-10, true, 0.5, ""};
    VerificationReport b{"n=2 parseval", "w1=1 w2=2", 1, 2e-3, 1e-3, false, 9.0, "grid error"};
    return {SuiteResult{"demo", {a, b}, 9.5}};
}

} // namespace

TEST(Report, JsonSchemaAndComplexPairs)
{
    auto j = to_json(sample(), 7);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(j["seed"], 7);
    EXPECT_FALSE(j["pass"].get<bool>());
    EXPECT_EQ(j["suites"][0]["reports"].size(), 2u);
    EXPECT_EQ(cplx_to_json(cplx(1.5, -2.0)), json::parse("[1.5, -2.0]"));
    EXPECT_EQ(cplx_from_json(json::parse("[0.25, 3]")), cplx(0.25, 3.0));
    EXPECT_EQ(cplx_from_json(json(2.0)), cplx(2.0));
    EXPECT_THROW(cplx_from_json(json::parse("[1, 2, 3]")), Error);
}

TEST(Report, JsonWithoutTimeIsDeterministic)
{
    auto a = sample(), b = sample();
    b[0].reports[0].wall_time = 42.0;
    b[0].wall_time = 1.0;
    EXPECT_EQ(to_json(a, 3, false).dump(), to_json(b, 3, false).dump());
}

TEST(Report, NonFiniteResidualSerialisedAsNull)
{
    auto s = sample();
    s[0].reports[1].max_residual = INFINITY;
    auto j = to_json(s, 1);
    EXPECT_TRUE(j["suites"][0]["reports"][1]["max_residual"].is_null());
}

TEST(Report, CsvHasHeaderAndEscapesCommas)
{
    std::string csv = to_csv(sample());
    std::istringstream in(csv);
    std::string header, row;
    std::getline(in, header);
    EXPECT_EQ(header, "suite,check,params,probes,max_residual,tolerance,pass,wall_time");
    std::getline(in, row);
    EXPECT_NE(row.find("\"w1=1 w2=2, n=1\""), std::string::npos);
    int lines = 1;
    while (std::getline(in, row))
        ++lines;
    EXPECT_EQ(lines, 2);
}

TEST(Report, ParamsRoundTrip)
{
    auto p = params_from_json(json::parse(R"({"omega1": [1, 0.5], "omega2": [1, -0.5], "g": 0.8, "n": 2})"));
    EXPECT_EQ(p.w.w1, cplx(1.0, 0.5));
    EXPECT_EQ(p.n, 2);
    auto q = params_from_json(params_to_json(p));
    EXPECT_EQ(q.w.w2, p.w.w2);
    EXPECT_EQ(q.g, p.g);
    EXPECT_THROW(params_from_json(json::parse(R"({"omega1": 1, "omega2": 2, "n": 2})")), Error);
    EXPECT_THROW(params_from_json(json::parse(R"({"omega1": 1, "omega2": 2, "g": -0.5, "n": 2})")), Error);
}

TEST(Report, TestFunctionFromJson)
{
    auto f = test_function_from_json(
        json::parse(R"({"n": 2, "width": 0.9, "center": [0.1, 0.4], "poly": [{"alpha": [], "c": 1},
                       {"alpha": [1], "c": [0.2, 0.1]}]})"));
    EXPECT_EQ(f.n, 2);
    EXPECT_EQ(f.poly.size(), 2u);
    EXPECT_THROW(test_function_from_json(json::parse(R"({"n": 2, "center": [0.1]})")), Error);
}

TEST(Report, CheckPassIffWithinTolerance)
{
    Check c("x", "p", 1e-6);
    c.add(5e-7);
    EXPECT_TRUE(c.finish().pass);
    Check d("x", "p", 1e-6);
    d.add(2e-6);
    EXPECT_FALSE(d.finish().pass);
    Check e("x", "p", 1e-6);
    e.add(NAN);
    EXPECT_FALSE(e.finish().pass);
}

TEST(Report, EverySuiteIsRegistered)
{
    EXPECT_EQ(suite_registry().size(), 15u);
    EXPECT_THROW(run_suite("nonexistent", 1), Error);
    auto r = run_suite("s2-values", 1);
    EXPECT_TRUE(r.pass());
}
