// Copyright 2026 The qchop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the built qchop executable end to end.

#include <gtest/gtest.h>
#include <json.hpp>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qchop_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    // Runs the CLI with `args`, returning its exit status.
    int qchop(const std::string& args) const {
        const std::string cmd = std::string(QCHOP_CLI_PATH) + " " + args + " >" + (dir_ / "stdout.txt").string() +
                                " 2>" + (dir_ / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string out(const std::string& name) const { return (dir_ / name).string(); }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    std::string stderr_text() const { return slurp(dir_ / "stderr.txt"); }

    fs::path dir_;
};

int count_lines(const std::string& text) {
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

constexpr const char* kBasicRun = "run --problem mis --n 6 --seed 7 --algorithm qchop --T 2piN2";

TEST_F(Cli, BasicRunWritesAHundredAndOneRows) {
    ASSERT_EQ(qchop(std::string(kBasicRun) + " --out " + out("a")), 0) << stderr_text();
    std::vector<fs::path> csvs;
    for (const auto& e : fs::directory_iterator(out("a")))
        if (e.path().extension() == ".csv") csvs.push_back(e.path());
    ASSERT_EQ(csvs.size(), 1u);
    const std::string csv = slurp(csvs[0]);
    EXPECT_EQ(csv.rfind("t,r,p_feas,p_opt,p_eps\n", 0), 0u);
    EXPECT_EQ(count_lines(csv), 102);

    const json summary = json::parse(slurp(fs::path(out("a")) / "summary.json"));
    ASSERT_EQ(summary["runs"].size(), 1u);
    const auto& run = summary["runs"][0];
    EXPECT_EQ(run["meta"]["variant"], "qchop");
    EXPECT_EQ(run["meta"]["n"], 6);
    EXPECT_DOUBLE_EQ(run["meta"]["T"].get<double>(), 2 * 3.14159265358979323846 * 36);
    EXPECT_LE(run["integrator"]["max_norm_drift"].get<double>(), 1e-6);
    EXPECT_GT(run["integrator"]["accepted_steps"].get<long long>(), 0);
    EXPECT_EQ(summary["failures"], 0);
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
    ASSERT_EQ(qchop(std::string(kBasicRun) + " --out " + out("a")), 0) << stderr_text();
    ASSERT_EQ(qchop(std::string(kBasicRun) + " --out " + out("b")), 0) << stderr_text();
    for (const auto& e : fs::directory_iterator(out("a"))) {
        const fs::path twin = fs::path(out("b")) / e.path().filename();
        ASSERT_TRUE(fs::exists(twin)) << twin;
        EXPECT_EQ(slurp(e.path()), slurp(twin)) << e.path().filename();
    }
}

TEST_F(Cli, ConfigEchoReproducesTheRun) {
    ASSERT_EQ(qchop("run --problem knapsack --n 4 --seeds 2 --algorithm qchop,saa --T 30,2piN --eps 0.1 --out " +
                    out("a")),
              0)
        << stderr_text();
    ASSERT_EQ(qchop("run --config " + out("a") + "/summary.json --out " + out("b")), 0) << stderr_text();
    int files = 0;
    for (const auto& e : fs::directory_iterator(out("a"))) {
        EXPECT_EQ(slurp(e.path()), slurp(fs::path(out("b")) / e.path().filename())) << e.path().filename();
        ++files;
    }
    EXPECT_EQ(files, 2 * 2 * 2 + 1);
}

TEST_F(Cli, PairedSummaryAcrossSeeds) {
    ASSERT_EQ(qchop("run --problem mis --n 6 --seeds 10 --algorithm qchop,saa --T 2piN2 --out " + out("a")), 0)
        << stderr_text();
    const json summary = json::parse(slurp(fs::path(out("a")) / "summary.json"));
    EXPECT_EQ(summary["runs"].size(), 20u);
    EXPECT_EQ(summary["aggregates"].size(), 2u);
    ASSERT_EQ(summary["comparisons"].size(), 1u);
    const auto& c = summary["comparisons"][0]["comparison"];
    EXPECT_EQ(c["deltas"].size(), 10u);
    EXPECT_EQ(c["r"]["wins"].get<int>() + c["r"]["losses"].get<int>() + c["r"]["ties"].get<int>(), 10);

    // The standalone compare subcommand agrees with the embedded one.
    ASSERT_EQ(qchop("compare " + out("a") + "/summary.json --a qchop --b saa --out " + out("cmp.json")), 0)
        << stderr_text();
    EXPECT_EQ(json::parse(slurp(out("cmp.json"))), c);
    // Without a variant filter every instance appears twice.
    EXPECT_EQ(qchop("compare " + out("a") + "/summary.json"), 1);
}

TEST_F(Cli, GeneratedFileRunsLikeTheGenerator) {
    ASSERT_EQ(qchop("generate --problem auction --n 5 --items 3 --seed 4 --out " + out("auc.json")), 0)
        << stderr_text();
    ASSERT_EQ(qchop("run --instance " + out("auc.json") + " --algorithm saa --T 40 --out " + out("f")), 0)
        << stderr_text();
    ASSERT_EQ(qchop("run --problem auction --n 5 --seed 4 --algorithm saa --T 40 --out " + out("g")), 0)
        << stderr_text();
    EXPECT_EQ(slurp(fs::path(out("f")) / "auc__saa__T40.csv"),
              slurp(fs::path(out("g")) / "auction-n5-s4__saa__T40.csv"));
}

TEST_F(Cli, ConfigurationErrorsExitWithOne) {
    EXPECT_EQ(qchop("run --instance " + out("missing.json") + " --out " + out("x")), 1);
    EXPECT_NE(stderr_text().find("missing.json"), std::string::npos) << stderr_text();
    EXPECT_EQ(qchop("run --problem tsp --out " + out("x")), 1);
    EXPECT_EQ(qchop("run --algorithm annealing --out " + out("x")), 1);
    EXPECT_EQ(qchop("run --T soon --out " + out("x")), 1);
    EXPECT_EQ(qchop("run --unknown-flag"), 1);
    EXPECT_EQ(qchop(""), 1);
}

TEST_F(Cli, PartialFailureExitsWithTwo) {
    std::ofstream(out("heavy.json"))
        << R"({"kind": "knapsack", "n": 2, "payload": {"values": [3, 4], "weights": [2, 9], "capacity": 5}})";
    ASSERT_EQ(qchop("generate --problem knapsack --n 3 --seed 1 --out " + out("ok.json")), 0);
    EXPECT_EQ(qchop("run --instance " + out("ok.json") + " --instance " + out("heavy.json") + " --T 20 --out " +
                    out("r")),
              2);
    const json summary = json::parse(slurp(fs::path(out("r")) / "summary.json"));
    EXPECT_EQ(summary["failures"], 1);
    EXPECT_TRUE(summary["runs"][1].contains("error"));
    EXPECT_TRUE(fs::exists(fs::path(out("r")) / "ok__qchop__T20.csv"));
}

}  // namespace
