#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "ellprod/verification.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "ellprod_cli_test";

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct CliResult {
    int status;
    std::string err;
};

CliResult run(const std::string& args) {
    const fs::path err = kWork / "stderr.txt";
    const std::string cmd = std::string(ELLPROD_CLI) + " " + args + " > " + (kWork / "stdout.txt").string() + " 2> " +
                            err.string();
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(err)};
}

const char* kSpectrumConfig = R"({
  "ensemble": {"n": 8, "m": 2, "rho": 0.5, "entry_dist": "gaussian", "truncation": null, "master_seed": 21},
  "trials": 2,
  "z_list": [[0.5, 0.2]]
})";

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        fs::remove_all(kWork);
        fs::create_directories(kWork);
    }
};

}  // namespace

TEST_F(Cli, RhoOutOfRangeIsConfigError) {
    write(kWork / "c.json", kSpectrumConfig);
    const CliResult r = run("spectrum --config " + (kWork / "c.json").string() + " --set ensemble.rho=1.5 --out " +
                      (kWork / "o").string());
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("rho"), std::string::npos) << r.err;
}

TEST_F(Cli, MalformedJsonReportsLineAndColumn) {
    write(kWork / "bad.json", "{\n  \"trials\": 2,\n  \"ensemble\": {\"n\": 8,,}\n}\n");
    const CliResult r = run("sample --config " + (kWork / "bad.json").string() + " --out " + (kWork / "o").string());
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.err.find("line 3, column 23"), std::string::npos) << r.err;
}

TEST_F(Cli, UnknownKeyAndMisappliedFlagsRejected) {
    write(kWork / "c.json", R"({"ensemble": {"n": 8}, "tirals": 3})");
    EXPECT_EQ(run("sample --config " + (kWork / "c.json").string() + " --out " + (kWork / "o").string()).status, 2);
    write(kWork / "s.json", R"({"m_list": [2]})");
    EXPECT_EQ(run("solve --config " + (kWork / "s.json").string() + " --seed 3 --out " + (kWork / "o").string()).status,
              2);
    EXPECT_EQ(run("sample --out " + (kWork / "o").string()).status, 2);
    EXPECT_EQ(run("frobnicate").status, 2);
}

TEST_F(Cli, SpectrumIsByteIdenticalAndManifestMatches) {
    write(kWork / "c.json", kSpectrumConfig);
    const std::string before = slurp(kWork / "c.json");
    for (const char* out : {"a", "b"}) {
        const CliResult r = run("spectrum --config " + (kWork / "c.json").string() + " --out " + (kWork / out).string());
        ASSERT_EQ(r.status, 0) << r.err;
    }
    EXPECT_EQ(slurp(kWork / "c.json"), before);
    const auto manifest = nlohmann::json::parse(slurp(kWork / "a" / "manifest.json"));
    EXPECT_EQ(manifest.at("subcommand"), "spectrum");
    std::size_t csvs = 0;
    for (const auto& f : manifest.at("files")) {
        const std::string name = f.at("path");
        const std::string a = slurp(kWork / "a" / name);
        EXPECT_EQ(a, slurp(kWork / "b" / name)) << name;
        EXPECT_EQ(f.at("sha256").get<std::string>(), ellprod::sha256_hex(a));
        csvs += name.ends_with(".csv") ? 1 : 0;
    }
    EXPECT_EQ(csvs, 4u);  // eigenvalues and symmetrized spectra for two trials
}

TEST_F(Cli, LadderAndSeedOverrides) {
    write(kWork / "c.json", kSpectrumConfig);
    const CliResult r = run("spectrum --config " + (kWork / "c.json").string() + " --ladder 8,12 --seed 5 --out " +
                      (kWork / "o").string());
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(fs::exists(kWork / "o" / "eigenvalues_n12_t1.csv"));
    const auto cfg = nlohmann::json::parse(slurp(kWork / "o" / "config.json"));
    EXPECT_EQ(cfg.at("ensemble").at("master_seed"), 5);
    EXPECT_EQ(run("spectrum --config " + (kWork / "c.json").string() + " --ladder 8,x --out " +
                  (kWork / "o").string())
                  .status,
              2);
}

TEST_F(Cli, VerifyExitCodeFollowsReport) {
    write(kWork / "q.json", ellprod::to_json(ellprod::quick_verify_config()).dump());
    const CliResult r = run("verify --config " + (kWork / "q.json").string() + " --threads 2 --out " + (kWork / "v").string());
    ASSERT_TRUE(fs::exists(kWork / "v" / "report.json")) << r.err;
    const auto report = nlohmann::json::parse(slurp(kWork / "v" / "report.json"));
    EXPECT_EQ(r.status, report.at("all_passed").get<bool>() ? 0 : 1);
    EXPECT_TRUE(fs::exists(kWork / "v" / "timing.json"));
    EXPECT_TRUE(fs::exists(kWork / "v" / "manifest.json"));
}

TEST_F(Cli, OtherSubcommandsProduceOutputs) {
    write(kWork / "l.json", R"({"m": 3, "grid": {"step": 0.1}, "samples": 100})");
    ASSERT_EQ(run("limit --config " + (kWork / "l.json").string() + " --out " + (kWork / "l").string()).status, 0);
    EXPECT_TRUE(fs::exists(kWork / "l" / "fuss_catalan_moments.csv"));
    EXPECT_TRUE(fs::exists(kWork / "l" / "limit_samples.csv"));

    write(kWork / "s.json", R"({"z_list": [0.5], "m_list": [2], "grid_points": 201})");
    ASSERT_EQ(run("solve --config " + (kWork / "s.json").string() + " --out " + (kWork / "s").string()).status, 0);
    EXPECT_TRUE(fs::exists(kWork / "s" / "profile_statement_m2_z0.csv"));

    write(kWork / "p.json", R"({"ensemble": {"n": 16, "rho": 0.2}, "trials": 2, "grid": {"step": 0.25}})");
    ASSERT_EQ(run("potential --config " + (kWork / "p.json").string() + " --out " + (kWork / "p").string()).status, 0);
    EXPECT_TRUE(fs::exists(kWork / "p" / "density.csv"));

    write(kWork / "m.json", R"({"ensemble": {"n": 4, "m": 3}})");
    ASSERT_EQ(run("sample --config " + (kWork / "m.json").string() + " --out " + (kWork / "m").string()).status, 0);
    EXPECT_TRUE(fs::exists(kWork / "m" / "factor_t0_q3.csv"));
}
