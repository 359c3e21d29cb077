#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* env = std::getenv("RANGEUDF_CLI");
    return env ? env : "build/tools/rangeudf";
}

int run_cli(const std::string& args, std::string* output = nullptr) {
    auto out_file = testutil::scratch_file("cli_out.txt");
    std::string cmd = cli_path() + " " + args + " > " + out_file + " 2>&1";
    int rc = std::system(cmd.c_str());
    if (output) {
        std::ifstream in(out_file);
        std::stringstream ss;
        ss << in.rdbuf();
        *output = ss.str();
    }
    return WEXITSTATUS(rc);
}

std::string work_dir() {
    auto d = testutil::scratch_dir() / "cli";
    fs::create_directories(d);
    return d.string();
}

}  // namespace

TEST(Cli, UnknownSubcommandUsageExit1) {
    std::string out;
    EXPECT_EQ(run_cli("frobnicate", &out), 1);
}

TEST(Cli, EvalIdentityGivesPerfectScores) {
    auto dir = work_dir();
    ASSERT_EQ(run_cli("gen-scenes --random 1 --seed 11 --tessellation 4 --out-dir " + dir + "/sc"), 0);
    std::string out;
    ASSERT_EQ(run_cli("eval --pred " + dir + "/sc/scene_000.ply --gt " + dir + "/sc/scene_000.ply",
                      &out),
              0);
    auto j = nlohmann::json::parse(out);
    EXPECT_EQ(j["reconstruction"]["cd_l1"], 0.0);
    EXPECT_EQ(j["reconstruction"]["fs_delta"], 1.0);
}

TEST(Cli, EvalJsonKeysAreSorted) {
    auto dir = work_dir();
    run_cli("gen-scenes --random 1 --seed 12 --tessellation 4 --out-dir " + dir + "/sck");
    std::string out;
    ASSERT_EQ(run_cli("eval --pred " + dir + "/sck/scene_000.ply --gt " + dir + "/sck/scene_000.ply",
                      &out),
              0);
    // Keys inside "reconstruction" appear in lexicographic order.
    auto cd = out.find("cd_l1");
    auto fs2 = out.find("fs_2delta");
    auto fsd = out.find("fs_delta");
    auto gt = out.find("gt_count");
    ASSERT_NE(cd, std::string::npos);
    EXPECT_LT(cd, fs2);
    EXPECT_LT(fs2, fsd);
    EXPECT_LT(fsd, gt);
}

TEST(Cli, MissingConfigIsIoErrorExit2) {
    EXPECT_EQ(run_cli("train --config /does/not/exist.json"), 2);
}

TEST(Cli, UnknownConfigKeyRejected) {
    auto dir = work_dir();
    auto cfg_path = dir + "/bad.json";
    testutil::write_text(cfg_path, R"({"scenes_dir": "x", "mystery_knob": 3})");
    std::string out;
    EXPECT_EQ(run_cli("train --config " + cfg_path, &out), 1);
    EXPECT_NE(out.find("mystery_knob"), std::string::npos);
}

TEST(Cli, FullPipelineSmoke) {
    // gen-scenes -> gen-data -> train -> reconstruct -> segment -> eval on a
    // deliberately tiny budget; checks wiring and exit codes, not quality.
    auto dir = work_dir() + "/pipe";
    fs::create_directories(dir);
    ASSERT_EQ(run_cli("gen-scenes --random 2 --seed 21 --tessellation 4 --out-dir " + dir), 0);
    for (std::string i : {"000", "001"})
        ASSERT_EQ(run_cli("gen-data --mesh " + dir + "/scene_" + i + ".ply --out " + dir + "/scene_" +
                          i + ".ruqs --n-on 300 --n-off 1500 --seed 4"),
                  0);

    nlohmann::json cfg = {{"seed", 3},
                          {"scenes_dir", dir},
                          {"out_checkpoint", dir + "/model.ruck"},
                          {"loss_csv", dir + "/loss.csv"},
                          {"epochs", 8},
                          {"batch_scenes", 2},
                          {"queries_per_scene", 256},
                          {"surface_points", 256},
                          {"threads", 2}};
    testutil::write_text(dir + "/train.json", cfg.dump());
    ASSERT_EQ(run_cli("train --config " + dir + "/train.json"), 0);
    EXPECT_TRUE(fs::exists(dir + "/model.ruck"));
    EXPECT_TRUE(fs::exists(dir + "/loss.csv"));

    // Reconstruction from an 8-epoch model may legitimately fail to find the
    // surface; accept success or a clean validation failure.
    std::string out;
    int rc = run_cli("reconstruct --checkpoint " + dir + "/model.ruck --cloud " + dir +
                         "/scene_000.ply --out-points " + dir + "/dense.ply --n-min 500 --residual 0.02",
                     &out);
    EXPECT_TRUE(rc == 0 || rc == 1) << out;

    ASSERT_EQ(run_cli("segment --checkpoint " + dir + "/model.ruck --cloud " + dir +
                      "/scene_000.ply --out " + dir + "/labeled.ply"),
              0);

    if (rc == 0) {
        ASSERT_EQ(run_cli("eval --pred " + dir + "/dense.ply --gt " + dir + "/scene_000.ply --gt-mesh " +
                              dir + "/scene_000.ply --out " + dir + "/report.json",
                          &out),
                  0);
        auto j = nlohmann::json::parse(std::ifstream(dir + "/report.json"));
        EXPECT_TRUE(j.contains("reconstruction"));
        EXPECT_TRUE(std::isfinite(j["reconstruction"]["cd_l1"].get<double>()));
    }
}

TEST(Cli, SeedReproducible) {
    auto dir = work_dir() + "/repro";
    fs::create_directories(dir);
    ASSERT_EQ(run_cli("gen-scenes --random 1 --seed 33 --tessellation 4 --out-dir " + dir + "/a"), 0);
    ASSERT_EQ(run_cli("gen-scenes --random 1 --seed 33 --tessellation 4 --out-dir " + dir + "/b"), 0);
    std::ifstream fa(dir + "/a/scene_000.ply", std::ios::binary);
    std::ifstream fb(dir + "/b/scene_000.ply", std::ios::binary);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());

    ASSERT_EQ(run_cli("gen-data --mesh " + dir + "/a/scene_000.ply --out " + dir +
                      "/qa.ruqs --n-on 100 --n-off 500 --seed 9"),
              0);
    ASSERT_EQ(run_cli("gen-data --mesh " + dir + "/b/scene_000.ply --out " + dir +
                      "/qb.ruqs --n-on 100 --n-off 500 --seed 9"),
              0);
    std::ifstream qa(dir + "/qa.ruqs", std::ios::binary), qb(dir + "/qb.ruqs", std::ios::binary);
    std::stringstream sqa, sqb;
    sqa << qa.rdbuf();
    sqb << qb.rdbuf();
    EXPECT_EQ(sqa.str(), sqb.str());
}
