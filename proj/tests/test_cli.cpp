#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>
#include <json.hpp>

#ifndef BERGMAN_NORM_EXE
#error "BERGMAN_NORM_EXE must name the CLI binary"
#endif

using nlohmann::json;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "\"" BERGMAN_NORM_EXE "\" " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int st = pclose(pipe);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

const std::string kFast = " --samples 128000 --chunks 16";

}  // namespace

TEST(Cli, ConstantSubcommand) {
    const auto r = run("constant --n 1 --alpha 0");
    ASSERT_EQ(r.status, 0);
    const auto j = json::parse(r.out);
    EXPECT_NEAR(j.at("C").at("value").get<double>(), 8.0 / std::numbers::pi, 1e-14);
    EXPECT_EQ(j.at("C").at("route"), "closed-form");
    EXPECT_DOUBLE_EQ(j.at("theta").at("value").get<double>(), 2.0);
}

TEST(Cli, InvalidInputExitsTwo) {
    EXPECT_EQ(run("constant --alpha -1").status, 2);
    EXPECT_EQ(run("constant --n 0").status, 2);
    EXPECT_EQ(run("scan --n 1").status, 2);
    EXPECT_EQ(run("scan --n 2 --grid-points 5").status, 2);
    EXPECT_EQ(run("verify --suite bogus").status, 2);
    EXPECT_EQ(run("verify --suite jct --samples 1000 --chunks 7").status, 2);
    EXPECT_EQ(run("appendix --t 2.5" + kFast).status, 2);
    EXPECT_EQ(run("").status, 2);
}

TEST(Cli, VerifyPassesAndReportsChecks) {
    const auto r = run("verify --suite jct --n 1" + kFast);
    ASSERT_EQ(r.status, 0) << r.out;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("command"), "verify");
    std::size_t checks = 0;
    for (const auto& s : j.at("suites")) {
        for (const auto& c : s.at("checks")) {
            EXPECT_TRUE(c.at("pass").get<bool>()) << c.dump();
            ++checks;
        }
    }
    EXPECT_EQ(checks, 13u);
}

TEST(Cli, VerificationFailureExitsFour) {
    // With no relative band the r = 0.99 surrogate cannot reach 8/pi.
    const auto r = run("verify --suite fzeta --n 1 --limit-tolerance 0 --limit-sigma 3" + kFast);
    EXPECT_EQ(r.status, 4);
}

TEST(Cli, ByteIdenticalForIdenticalConfig) {
    for (const std::string c : {"scan --n 2 --alpha 0 --grid-points 9", "appendix --grid-points 9",
                                "verify --suite moments --n 2"}) {
        const auto a = run(c + kFast);
        const auto b = run(c + kFast);
        EXPECT_EQ(a.status, b.status);
        EXPECT_FALSE(a.out.empty());
        EXPECT_EQ(a.out, b.out) << c;
    }
}

TEST(Cli, SeedFromEnvironment) {
    const std::string c = "scan --n 2 --grid-points 9" + kFast;
    const auto env = run(c, "BERGMAN_NORM_SEED=7");
    ASSERT_EQ(env.status, 0);
    EXPECT_EQ(json::parse(env.out).at("config").at("seed").get<std::uint64_t>(), 7u);
    const auto flag = run(c + " --seed 7");
    EXPECT_EQ(env.out, flag.out);
    const auto both = run(c + " --seed 9", "BERGMAN_NORM_SEED=7");
    EXPECT_EQ(json::parse(both.out).at("config").at("seed").get<std::uint64_t>(), 9u);
    EXPECT_EQ(json::parse(run(c).out).at("config").at("seed").get<std::uint64_t>(), 42u);
}

TEST(Cli, OutFileMatchesStdout) {
    const std::string path = testing::TempDir() + "bnorm_cli_out.json";
    const std::string c = "constant --n 3 --alpha 0.5";
    const auto direct = run(c);
    ASSERT_EQ(run(c + " --out " + path).status, 0);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), direct.out);
    std::remove(path.c_str());
}

TEST(Cli, CsvAndTableFormats) {
    const auto csv = run("scan --n 2 --grid-points 9 --format csv" + kFast);
    ASSERT_EQ(csv.status, 0);
    EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "t,estimate,std_error,lower_bound,upper_bound");
    std::size_t rows = 0;
    std::istringstream is(csv.out);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] != '#') ++rows;
    }
    EXPECT_EQ(rows, 9u);
    EXPECT_NE(csv.out.find("# verdict="), std::string::npos);
    const auto table = run("scan --n 2 --grid-points 9 --format table" + kFast);
    EXPECT_EQ(table.status, 0);
    EXPECT_NE(table.out.find("verdict"), std::string::npos);
}

TEST(Cli, ScanJsonShape) {
    const auto r = run("scan --n 2 --alpha 0 --grid-points 9" + kFast);
    ASSERT_EQ(r.status, 0);
    const auto j = json::parse(r.out);
    const auto& rows = j.at("rows");
    ASSERT_EQ(rows.size(), 9u);
    for (const auto& row : rows) {
        EXPECT_TRUE(row.at("estimate").contains("std_error"));
        EXPECT_TRUE(row.at("estimate").contains("method"));
        EXPECT_EQ(row.at("upper_bound").at("route"), "closed-form");
    }
    const auto& s = j.at("summary");
    EXPECT_TRUE(s.contains("verdict"));
    EXPECT_NEAR(s.at("conjectured_value").at("value").get<double>(), 3.0 * std::numbers::pi, 1e-12);
}

TEST(Cli, AppendixSelectedPoints) {
    const auto r = run("appendix --t 0,0.785398,1.570796" + kFast);
    ASSERT_EQ(r.status, 0) << r.out;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("I_grid").size(), 3u);
}
