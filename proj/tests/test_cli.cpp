#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "json.hpp"

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args)
{
    std::string cmd = std::string(RSR_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe))
        out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string write_params(const std::string& name, const std::string& body)
{
    std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << body;
    return path;
}

nlohmann::json strip_time(nlohmann::json j)
{
    for (auto& s : j["suites"]) {
        s.erase("wall_time");
        for (auto& r : s["reports"])
            r.erase("wall_time");
    }
    return j;
}

} // namespace

TEST(Cli, VerifySuiteS2EmitsJsonAndPasses)
{
    auto r = run("verify --suite s2 --seed 7");
    EXPECT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Cli, SameSeedGivesIdenticalReport)
{
    auto a = run("verify --suite s2-homogeneity --seed 3");
    auto b = run("verify --suite s2-homogeneity --seed 3");
    EXPECT_EQ(strip_time(nlohmann::json::parse(a.out)).dump(), strip_time(nlohmann::json::parse(b.out)).dump());
}

TEST(Cli, InvalidCouplingExitsTwo)
{
    auto path = write_params("bad.json", R"({"omega1": [1, 0], "omega2": [2, 0], "g": [-0.5, 0], "n": 2})");
    std::string cmd = std::string(RSR_CLI_PATH) + " --params " + path + " measure eval --kind mu --x 0.1,0.2 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 512> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe))
        out.append(buf.data(), n);
    int status = pclose(pipe);
    EXPECT_EQ(WEXITSTATUS(status), 2);
    EXPECT_NE(out.find("0 < Re g"), std::string::npos);
}

TEST(Cli, UnknownSubcommandExitsTwo)
{
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("verify --suite no-such-suite").code, 2);
}

TEST(Cli, WaveFunctionSingleParticleIsPlaneWave)
{
    auto path = write_params("p1.json", R"({"omega1": [1, 0], "omega2": [2, 0], "g": [0.8, 0], "n": 1})");
    auto r = run("--params " + path + " wavefn eval --lambda 0.25 --x 0.5");
    ASSERT_EQ(r.code, 0);
    auto v = nlohmann::json::parse(r.out)["value"];
    EXPECT_NEAR(v[0].get<double>(), std::cos(2.0 * M_PI * 0.125), 1e-13);
    EXPECT_NEAR(v[1].get<double>(), std::sin(2.0 * M_PI * 0.125), 1e-13);
}

TEST(Cli, S2EvalReportsSpecialValue)
{
    auto r = run("s2 eval --z 1,0 --omega1 1,0 --omega2 2,0");
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["value"][0].get<double>(), std::sqrt(2.0), 1e-12);
    EXPECT_TRUE(j.contains("error_estimate"));
}

TEST(Cli, TabulateS2HasHeaderAndRows)
{
    auto r = run("tabulate --kind s2 --omega1 1 --omega2 2 --from 0.1 --to 2.9 --points 100");
    ASSERT_EQ(r.code, 0);
    int lines = 0;
    for (char c : r.out)
        lines += c == '\n';
    EXPECT_EQ(lines, 101);
    EXPECT_EQ(r.out.rfind("arg_re,arg_im,value_re,value_im,error_estimate,flag", 0), 0u);
}

TEST(Cli, TabulateFlagsPolesWithoutAborting)
{
    auto r = run("tabulate --kind s2 --omega1 1 --omega2 2 --from 2 --to 4 --points 3");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find(",pole"), std::string::npos);
}

TEST(Cli, TabulateMuHasZeroAtOrigin)
{
    auto path = write_params("p2.json", R"({"omega1": 1, "omega2": 2, "g": 0.8, "n": 2})");
    auto r = run("--params " + path + " tabulate --kind mu --from -1 --to 1 --points 5");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("\n0,0,0,0,"), std::string::npos);
}

TEST(Cli, HamVerifyCommute)
{
    auto path = write_params("p3.json", R"({"omega1": 1, "omega2": 2, "g": 0.8, "n": 3})");
    auto r = run("--params " + path + " ham verify --check commute --format csv");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("suite,check,", 0), 0u);
}

TEST(Cli, TransformVerifyInversionSingleParticle)
{
    auto r = run("transform verify --check inversion --n 1 --seed 2");
    EXPECT_EQ(r.code, 0);
}

TEST(Cli, ToleranceOverrideCanFail)
{
    auto r = run("verify --suite s2-values --tolerance 0");
    EXPECT_EQ(r.code, 1);
}
