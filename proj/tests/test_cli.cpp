// Drives the built command-line tool and checks exit codes and outputs.

#include "reoh/commands.hpp"

#include "temp_dir.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace reoh;

namespace {

struct Result {
    int status = -1;
    std::string output;
};

Result reoh_cli(const TempDir& tmp, const std::string& args) {
    const auto log = tmp / "cli.log";
    const std::string cmd = std::string(REOH_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    Result r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream in(log);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

} // namespace

TEST(Cli, FullPipelineOnCiProfile) {
    TempDir tmp;
    const auto dir = tmp.path().string();
    auto r = reoh_cli(tmp, "benchmark --profile ci --seed 3 --out " + dir + "/train");
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_TRUE(std::filesystem::exists(tmp / "train/manifest.ini"));
    EXPECT_TRUE(std::filesystem::exists(tmp / "train/truth/manifest.ini"));

    r = reoh_cli(tmp, "sample --data " + dir + "/train/manifest.ini --app 2 --samples 12 --seed 5 --out " + dir +
                          "/s");
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(io::read_csv(tmp / "s/samples.csv").rows.size(), 12u);

    r = reoh_cli(tmp, "predict --training " + dir + "/train/manifest.ini --sample-file " + dir +
                          "/s/samples.csv --plan " + dir + "/s/plan.ini --out " + dir + "/p");
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("chosen config:"), std::string::npos);
    EXPECT_EQ(io::read_csv(tmp / "p/estimates.csv").rows.size(), 40u);

    r = reoh_cli(tmp, "run --data " + dir + "/train/manifest.ini --app 2 --choice " + dir + "/p/choice.ini");
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("delta"), std::string::npos);

    r = reoh_cli(tmp, "evaluate --profile ci --trials 1 --out " + dir + "/e");
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_NE(r.output.find("(~17%)"), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(tmp / "e/report.csv"));
}

TEST(Cli, ExitCodes) {
    TempDir tmp;
    const auto dir = tmp.path().string();
    ASSERT_EQ(reoh_cli(tmp, "benchmark --profile ci --out " + dir + "/train").status, 0);
    // Too few samples: estimator error, nothing measured.
    auto r = reoh_cli(tmp, "sample --data " + dir + "/train/manifest.ini --app 1 --samples 9 --out " + dir + "/s");
    EXPECT_EQ(r.status, 3) << r.output;
    EXPECT_FALSE(std::filesystem::exists(tmp / "s/samples.csv"));
    // Malformed input file.
    tmp.write("bad.csv", "config_id,mean_time_s\nnot-a-config,abc\n");
    r = reoh_cli(tmp, "predict --training " + dir + "/train/manifest.ini --sample-file " + dir + "/bad.csv --app 1");
    EXPECT_EQ(r.status, 2) << r.output;
    // Unknown configuration id.
    r = reoh_cli(tmp, "run --data " + dir + "/train/manifest.ini --app 1 --config-id ci-cpu:c9:f1:m1");
    EXPECT_EQ(r.status, 1) << r.output;
    // Usage errors.
    EXPECT_EQ(reoh_cli(tmp, "frobnicate").status, 1);
    EXPECT_EQ(reoh_cli(tmp, "").status, 1);
    EXPECT_EQ(reoh_cli(tmp, "--help").status, 0);
}

TEST(Cli, RunManifestSuppliesFlags) {
    TempDir tmp;
    const auto dir = tmp.path().string();
    tmp.write("run.ini", "[benchmark]\nprofile = ci\nseed = 4\nout = " + dir + "/train\n");
    const auto r = reoh_cli(tmp, "--config " + dir + "/run.ini benchmark");
    ASSERT_EQ(r.status, 0) << r.output;
    EXPECT_EQ(load_training(tmp / "train/manifest.ini").matrix.n_configs(), 40u);
}
