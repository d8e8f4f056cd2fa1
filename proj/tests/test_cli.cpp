#include <gtest/gtest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

// Runs the CLI with stderr discarded; `env` is prepended to the command line.
Run cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + OCCULEX_CLI_PATH + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

Json json_of(const Run& r) { return Json::parse(r.out); }

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("occulex_cli_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST(Cli, CountExample) {
    const auto text = cli("count --pattern 123 --k 3 --r 1 --n 3 --format text");
    EXPECT_EQ(text.status, 0);
    EXPECT_NE(text.out.find("f=1"), std::string::npos) << text.out;
    const auto doc = json_of(cli("count --pattern 123 --k 3 --r 1 --n 3..5"));
    EXPECT_EQ(doc["result"]["rows"][0]["f"], "1");
    // 123 once in ternary words of length 4 and 5 (brute force: 6, 23).
    EXPECT_EQ(doc["result"]["rows"][1]["f"], "6");
    EXPECT_EQ(doc["result"]["rows"][2]["f"], "23");
}

TEST(Cli, AutomatonExample) {
    const auto text = cli("automaton --pattern 123 --r 1 --k 3 --format text");
    EXPECT_EQ(text.status, 0);
    EXPECT_NE(text.out.find("6 states"), std::string::npos) << text.out;
    const auto doc = json_of(cli("automaton --pattern 123 --r 1 --k 3 --dot"));
    EXPECT_EQ(doc["result"]["states"], 6);
    EXPECT_EQ(doc["result"]["matrix"][0], Json::parse("[2,1,0,0,0,0]"));
    EXPECT_NE(doc["result"]["dot"].get<std::string>().find("digraph"), std::string::npos);
    EXPECT_EQ(json_of(cli("automaton --pattern 123 --r 1 --k 3 --method signature"))["result"]["matrix"],
              doc["result"]["matrix"]);
}

TEST(Cli, ReportEmbedsConfig) {
    const auto doc = json_of(cli("--seed 42 simulate --pattern 12 --k 2 --n 20 --samples 500"));
    EXPECT_EQ(doc["tool"], "occulex");
    EXPECT_TRUE(doc.contains("version"));
    EXPECT_EQ(doc["config"]["command"], "simulate");
    EXPECT_EQ(doc["config"]["seed"], 42);
    EXPECT_EQ(doc["config"]["parameters"]["samples"], 500);
    EXPECT_TRUE(doc["config"]["budgets"].contains("states"));
    EXPECT_FALSE(doc["anchors"].empty());
    EXPECT_FALSE(doc["result"].contains("seconds"));
    // Global flags are accepted after the command too.
    EXPECT_EQ(json_of(cli("simulate --pattern 12 --k 2 --n 20 --samples 500 --seed 42"))["config"]["seed"], 42);
}

TEST(Cli, ByteIdenticalAcrossRunsAndWorkers) {
    const std::string sim = "--seed 7 simulate --pattern 12 --k 2 --n 30 --samples 3000";
    const auto a = cli(sim), b = cli(sim), c = cli(sim + " --workers 3");
    EXPECT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, c.out);
    EXPECT_NE(a.out, cli("--seed 8 simulate --pattern 12 --k 2 --n 30 --samples 3000").out);
    const std::string poi = "--seed 3 poisson --samples 2000 --n 20,40";
    EXPECT_EQ(cli(poi).out, cli(poi + " --workers 2").out);
    const std::string bz = "--seed 3 boltzmann-sample --pattern 12 --k 2 --n 6 --x 1/2 --steps 20000";
    EXPECT_EQ(cli(bz).out, cli(bz).out);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli("count --pattern 123 --k 2 --r 1 --n 3").status, 2);     // pattern letter outside alphabet
    EXPECT_EQ(cli("count --pattern 12 --k 2 --r 1 --n 3..1").status, 2);   // empty range
    EXPECT_EQ(cli("partition --pattern 12 --k 2 --n 3 --x 3/2").status, 2);
    EXPECT_EQ(cli("frobnicate").status, 2);
    EXPECT_EQ(cli("count --pattern 12").status, 2);                        // missing options
    EXPECT_EQ(cli("--format yaml count --pattern 12 --k 2 --r 0 --n 2").status, 2);
    EXPECT_EQ(cli("limits --pattern 11 --r 0 --k 2").status, 2);           // d = 1
    EXPECT_EQ(cli("--budget-states 2 automaton --pattern 1234 --r 1 --k 4").status, 3);
    EXPECT_EQ(cli("--budget-samples 10 simulate --pattern 12 --k 2 --n 5 --samples 11").status, 3);
    EXPECT_EQ(cli("--budget-words 100 perm-profile --xi 12 --n 6").status, 3);
    EXPECT_EQ(cli("verify --criteria 1").status, 0);
    EXPECT_EQ(cli("verify --criteria 3").status, 1); // a printed generating function disagrees with exact algebra
}

TEST(Cli, VerifyReport) {
    const auto doc = json_of(cli("verify --suite paper-golden --criteria 1,9"));
    ASSERT_EQ(doc["result"]["criteria"].size(), 2U);
    for (const auto& c : doc["result"]["criteria"]) {
        EXPECT_TRUE(c["passed"]);
        for (const auto& ch : c["checks"]) {
            EXPECT_FALSE(ch["anchor"].get<std::string>().empty());
            EXPECT_EQ(ch["status"], "pass");
        }
    }
    // Criterion 2 is derived, not a published value, so the golden suite skips it.
    EXPECT_EQ(json_of(cli("verify --suite paper-golden --criteria 2"))["result"]["criteria"].size(), 0U);
    const auto csv = cli("verify --criteria 1 --format csv");
    EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "criterion,check,anchor,status,measured,target,tolerance");
}

TEST(Cli, CsvAndTextProjections) {
    const auto csv = cli("perm-profile --xi 12 --n 3 --format csv");
    EXPECT_EQ(csv.out, "r,count\n0,1\n1,2\n2,2\n3,1\n");
    const auto text = cli("perm-profile --xi 12 --n 3 --format text");
    EXPECT_EQ(text.out, "{0:1,1:2,2:2,3:1}\n");
    const auto doc = json_of(cli("perm-partition --xi 21 --n 10 --x 1/2"));
    EXPECT_TRUE(doc["result"]["matches_mahonian"]);
    EXPECT_EQ(doc["result"]["value"], doc["result"]["mahonian_product"]);
    const auto sw = json_of(cli("perm-sw --xi 123 --r 0 --n 5..7"));
    EXPECT_EQ(sw["result"]["points"][0]["f_0"], "42");
    EXPECT_EQ(sw["result"]["points"][2]["f_0"], "429");
}

TEST(Cli, ModuleCommandsRun) {
    const auto gf = json_of(cli("genfunc --pattern 123 --r 0 --k 3 --kind F --terms 5"));
    EXPECT_EQ(gf["result"]["factored"], "(3x^2 - 3x + 1) / (1 - 2x)^3");
    // (1 - 3x + 3x^2) sum C(n+2,2) 2^n x^n
    EXPECT_EQ(gf["result"]["series"], Json::parse(R"(["1","3","9","26","72","192"])"));
    const auto lim = json_of(cli("limits --pattern 123 --r 1 --k 3 --n-max 256"));
    EXPECT_EQ(lim["result"]["M_r"], 3);
    const auto part = json_of(cli("partition --pattern 12 --k 2 --n 2 --x 1/2 --m 2"));
    EXPECT_EQ(part["result"]["value"], "7/2");
    EXPECT_TRUE(part["result"]["submultiplicativity"]["holds"]);
    const auto trunc = json_of(cli("partition --pattern 12 --k 2 --n 8 --x 1/2 --mode trunc:2"));
    EXPECT_FALSE(trunc["result"]["exact"]);
    const auto ent = json_of(cli("entropy --pattern 12 --k 2 --n 5"));
    EXPECT_EQ(ent["result"]["points"].size(), 6U);
    const auto wl = json_of(cli("weak-limits --pattern 12 --k 2 --rho n^3 --n 6,8"));
    EXPECT_TRUE(wl["result"]["points"][0]["exact"]);
    const auto bz = json_of(cli("boltzmann-sample --pattern 12 --k 2 --n 4 --x 1/2 --steps 40000 --compare --show 3"));
    EXPECT_LT(bz["result"]["total_variation"].get<double>(), 0.05);
    EXPECT_EQ(bz["result"]["words"].size(), 3U);
    const auto poi = json_of(cli("poisson --schedule fixed:pattern=12,k=2 --samples 1000 --n 10,20"));
    EXPECT_EQ(poi["result"]["points"].size(), 2U);
}

TEST(Cli, CacheHitAndRebuild) {
    const auto dir = scratch("cache");
    const std::string cmd = "--timing --cache-dir " + dir.string() + " automaton --pattern 1234 --r 1 --k 4";
    const auto first = json_of(cli(cmd));
    EXPECT_FALSE(first["result"]["cache"]["hit"]);
    const auto second = json_of(cli(cmd));
    EXPECT_TRUE(second["result"]["cache"]["hit"]);
    EXPECT_EQ(first["result"]["matrix"], second["result"]["matrix"]);
    {
        std::ofstream f(dir / "au_1234_r1_k4.json", std::ios::trunc);
        f << "{\"format\":\"occulex-automaton\",\"version\":0}";
    }
    const auto third = json_of(cli(cmd));
    EXPECT_FALSE(third["result"]["cache"]["hit"]);
    EXPECT_TRUE(third["result"]["cache"]["rebuilt"]);
    EXPECT_EQ(third["result"]["matrix"], first["result"]["matrix"]);
    fs::remove_all(dir);
}

TEST(Cli, CacheDirFromEnvironment) {
    const auto dir = scratch("env");
    const auto r = cli("count --pattern 12 --k 2 --r 1 --n 4", "OCCULEX_CACHE=" + dir.string());
    EXPECT_EQ(r.status, 0);
    EXPECT_TRUE(fs::exists(dir / "au_12_r1_k2.json"));
    EXPECT_TRUE(fs::exists(dir / "au_12_r0_k2.json"));
    fs::remove_all(dir);
}

TEST(Cli, OutFile) {
    const auto dir = scratch("out");
    fs::create_directories(dir);
    const auto file = dir / "report.json";
    const auto r = cli("--out " + file.string() + " count --pattern 12 --k 2 --r 0 --n 4");
    EXPECT_EQ(r.status, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(file);
    EXPECT_EQ(Json::parse(in)["result"]["rows"][0]["f"], "5");
    fs::remove_all(dir);
}
