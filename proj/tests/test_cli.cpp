// SPDX-License-Identifier: Apache-2.0
//
// radcom: secrecy-constrained waveform design for joint passive radar and
// communications.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "radcom/experiments.hpp"

namespace radcom {
namespace {

namespace fs = std::filesystem;

const fs::path kScratch = fs::temp_directory_path() / "radcom_cli_test";

struct Outcome {
    int code = -1;
    std::string out;
};

// Runs the CLI with stdout captured to a file; stderr is discarded.
Outcome run_cli(const std::string& args)
{
    fs::create_directories(kScratch);
    // one capture file per test so parallel ctest runs do not collide
    const fs::path capture =
        kScratch / (std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + ".out");
    const std::string cmd = std::string("\"") + RADCOM_CLI_PATH + "\" " + args + " > \"" + capture.string() +
                            "\" 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(capture);
    std::ostringstream ss;
    ss << in.rdbuf();
    o.out = ss.str();
    return o;
}

std::string example(const std::string& name) { return std::string(RADCOM_EXAMPLES_DIR) + "/" + name; }

TEST(Cli, NoSubcommandIsBadArguments) { EXPECT_EQ(run_cli("").code, 2); }

TEST(Cli, UnknownFlagIsBadArguments) { EXPECT_EQ(run_cli("sweep --bogus 1").code, 2); }

TEST(Cli, NegativeThresholdIsBadArguments)
{
    EXPECT_EQ(run_cli("solve-one --config " + example("fig2.json") + " --r-m -1").code, 2);
}

TEST(Cli, UnknownSolverIsBadArguments)
{
    EXPECT_EQ(run_cli("sweep --config " + example("fig2.json") + " --thresholds 0 --solvers alg9").code, 2);
}

TEST(Cli, MalformedConfigNamesTheField)
{
    fs::create_directories(kScratch);
    const fs::path cfg = kScratch / "bad.json";
    std::ofstream(cfg) << R"({"n_tx": "four"})";
    const fs::path err = kScratch / "stderr.txt";
    const std::string cmd = std::string("\"") + RADCOM_CLI_PATH + "\" solve-one --config \"" + cfg.string() +
                            "\" --r-m 1 > /dev/null 2> \"" + err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    ASSERT_TRUE(WIFEXITED(raw));
    EXPECT_EQ(WEXITSTATUS(raw), 2);
    std::ifstream in(err);
    std::ostringstream ss;
    ss << in.rdbuf();
    EXPECT_NE(ss.str().find("n_tx"), std::string::npos) << ss.str();
}

TEST(Cli, SweepWritesBothCsvFiles)
{
    const fs::path out = kScratch / "sweep_out";
    fs::remove_all(out);
    const auto r = run_cli("sweep --config " + example("fig2.json") +
                           " --thresholds 0,2,4,6,8 --runs 3 --seed 7 --solvers alg2 --out \"" + out.string() + "\"");
    ASSERT_EQ(r.code, 0);
    const auto summary = read_csv(out / "summary.csv");
    const auto runs = read_csv(out / "runs.csv");
    EXPECT_EQ(summary.rows.size(), 5u);
    EXPECT_EQ(runs.rows.size(), 15u);
    EXPECT_EQ(summary.header.size(), 6u);
}

TEST(Cli, SolveOneDefaultConfigIsFeasible)
{
    const auto r = run_cli("solve-one --config " + example("fig2.json") + " --r-m 4 --seed 3 --solver alg2");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j.at("feasible").get<bool>());
    EXPECT_GE(j.at("achieved_secrecy").get<double>(), 4.0 - 1e-3);
}

TEST(Cli, VerifyPasses)
{
    const auto r = run_cli("verify");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}

} // namespace
} // namespace radcom
