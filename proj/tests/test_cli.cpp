// Copyright 2026 The invio Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "invio/checkpoint.hpp"
#include "test_util.hpp"

using namespace invio;
using namespace invio::cli;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

fs::path short_spec(const fs::path& dir, const std::string& extra = "") {
  return write_text(dir / "spec.json", R"({"duration": 6, "landmark_count": 300)" + extra + "}");
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(INVIO_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Simulate, ByteIdenticalPerSeed) {
  const fs::path dir = test::temp_dir("cli_sim");
  const fs::path spec = short_spec(dir, R"(, "pixel_noise": 0.5, "noise": {"sigma_g": 0.01, "sigma_a": 0.03})");
  SimulateOptions a{spec, dir / "a", 5}, b{spec, dir / "b", 5}, c{spec, dir / "c", 6};
  cmd_simulate(a);
  cmd_simulate(b);
  cmd_simulate(c);
  for (const char* f : {"imu0/data.csv", "state_groundtruth_estimate0/data.csv", "tracks.txt",
                        "camera.json", "true_bias.csv", "groundtruth.tum", "provenance.json"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  EXPECT_NE(slurp(dir / "a/imu0/data.csv"), slurp(dir / "c/imu0/data.csv"));
  EXPECT_NE(slurp(dir / "a/tracks.txt"), slurp(dir / "c/tracks.txt"));
}

TEST(Simulate, HoverReadsGravity) {
  const fs::path dir = test::temp_dir("cli_hover");
  const fs::path spec = write_text(dir / "spec.json", R"({"primitive": "hover", "duration": 2})");
  cmd_simulate({spec, dir / "out", std::nullopt});
  const Dataset d = load_euroc(dir / "out");
  for (const auto& s : d.imu) EXPECT_NEAR(s.accel.z(), 9.81, 1e-12);
}

TEST(Run, ZeroBiasOnNoiselessData) {
  const fs::path dir = test::temp_dir("cli_run");
  cmd_simulate({short_spec(dir), dir / "data", std::nullopt});
  std::ostringstream log;
  const VioResult r = cmd_run({dir / "data", {}, true, {}, {}, dir / "out"}, log);
  EXPECT_GT(r.updates, 0u);
  for (const char* f : {"trajectory.tum", "diagnostics.jsonl", "run.json", "metrics.json"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  }
  std::ostringstream out;
  const MetricReport m = cmd_eval({dir / "out/trajectory.tum", dir / "data", Alignment::kPosYaw, {}, {}}, out);
  EXPECT_LT(m.ate.translation_rmse, 1e-3);
}

TEST(Run, MissingTracksNamesThePath) {
  const fs::path dir = test::temp_dir("cli_notracks");
  cmd_simulate({short_spec(dir), dir / "data", std::nullopt});
  fs::remove(dir / "data/tracks.txt");
  std::ostringstream log;
  try {
    cmd_run({dir / "data", {}, true, {}, {}, dir / "out"}, log);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("tracks.txt"), std::string::npos) << e.what();
    EXPECT_EQ(exit_code(e), kExitData);
  }
  EXPECT_EQ(run_tool("run " + (dir / "data").string() + " --zero-bias --out " + (dir / "out").string()), kExitData);
}

TEST(Run, BiasSourceIsRequired) {
  const fs::path dir = test::temp_dir("cli_nobias");
  std::ostringstream log;
  EXPECT_THROW(cmd_run({dir, {}, false, {}, {}, dir / "out"}, log), ConfigError);
  EXPECT_EQ(run_tool("run " + dir.string() + " --out " + (dir / "out").string()), kExitConfig);
  EXPECT_EQ(run_tool("run " + dir.string() + " --zero-bias --checkpoint x.bin --out o"), kExitConfig);
}

TEST(Eval, IdenticalAndOffsetTrajectories) {
  const fs::path dir = test::temp_dir("cli_eval");
  Trajectory gt, off;
  for (int i = 0; i < 200; ++i) {
    const double t = 0.05 * i;
    gt.push_back({t, so3_exp(Vec3(0, 0, 0.3 * t)), Vec3(std::cos(t), std::sin(t), 0.1 * t)});
    off.push_back(gt.back());
    off.back().position += Vec3(0.1, 0, 0);
  }
  write_trajectory(dir / "gt.tum", gt, 1000000000LL);
  write_trajectory(dir / "off.tum", off, 1000000000LL);
  std::ostringstream out;
  EvalOptions same{dir / "gt.tum", dir / "gt.tum", Alignment::kNone, {}, dir / "m.json"};
  EXPECT_EQ(cmd_eval(same, out).ate.translation_rmse, 0.0);
  EXPECT_TRUE(fs::exists(dir / "m.json"));
  EvalOptions shifted{dir / "off.tum", dir / "gt.tum", Alignment::kNone, {}, {}};
  EXPECT_NEAR(cmd_eval(shifted, out).ate.translation_rmse, 0.1, 1e-9);
  EXPECT_EQ(run_tool("eval " + (dir / "off.tum").string() + " " + (dir / "gt.tum").string() + " --align none"),
            kExitOk);
  EXPECT_EQ(run_tool("eval " + (dir / "off.tum").string() + " " + (dir / "gt.tum").string() + " --align sim3"),
            kExitConfig);
}

TEST(ExitCodes, ErrorClasses) {
  EXPECT_EQ(exit_code(ConfigError("x")), kExitConfig);
  EXPECT_EQ(exit_code(InvalidArgument("x")), kExitConfig);
  EXPECT_EQ(exit_code(ParseError("f", 1, "x")), kExitData);
  EXPECT_EQ(exit_code(DataError("x")), kExitData);
  EXPECT_EQ(exit_code(IoError("x")), kExitData);
  EXPECT_EQ(exit_code(InsufficientData("x")), kExitData);
  EXPECT_EQ(exit_code(NumericError("x")), kExitNumeric);
  EXPECT_EQ(exit_code(TrainingDiverged(3, "x")), kExitDiverged);
  EXPECT_EQ(run_tool("frobnicate"), kExitConfig);
  EXPECT_EQ(run_tool("--help"), kExitOk);
}

TEST(Train, ZeroEpochsAndResumeTrace) {
  const fs::path dir = test::temp_dir("cli_train");
  cmd_simulate({short_spec(dir, R"(, "bias_profile": "constant", "bias": {"gyro": [0.01, 0, 0]})"), dir / "data",
                std::nullopt});
  const fs::path config = write_text(dir / "config.json", R"({
    "network": {"window": 40, "widths": [4, 8], "kernel": 3, "stem_kernel": 3},
    "training": {"epochs": 2, "batch_size": 8}
  })");
  std::ostringstream log;
  TrainOptions zero{{dir / "data"}, {}, config, dir / "zero.bin", {}, {}, 0};
  const TrainResult z = cmd_train(zero, log);
  EXPECT_TRUE(z.trace.empty());
  EXPECT_EQ(load_checkpoint(dir / "zero.bin").epochs_trained, 0);

  TrainOptions first{{dir / "data"}, {dir / "data"}, config, dir / "net.bin", {}, {}, std::nullopt};
  cmd_train(first, log);
  TrainOptions resume{{dir / "data"}, {dir / "data"}, config, dir / "net2.bin", dir / "net.bin.loss.csv",
                      dir / "net.bin", std::nullopt};
  cmd_train(resume, log);
  std::istringstream trace(slurp(dir / "net.bin.loss.csv"));
  std::string line;
  std::vector<int> epochs;
  std::getline(trace, line);
  EXPECT_EQ(line, "epoch,train_loss,validation_loss");
  while (std::getline(trace, line)) epochs.push_back(std::stoi(line));
  const int resumed_from = load_checkpoint(dir / "net.bin").epochs_trained;
  ASSERT_EQ(epochs.size(), 4u);
  EXPECT_EQ(epochs[0], 1);
  EXPECT_EQ(epochs[1], 2);
  EXPECT_EQ(epochs[2], resumed_from + 1);
  EXPECT_EQ(epochs[3], resumed_from + 2);
}

TEST(Blackout, WritesTable) {
  const fs::path dir = test::temp_dir("cli_blackout");
  cmd_simulate({short_spec(dir), dir / "data", std::nullopt});
  BlackoutOptions opt;
  opt.dataset = dir / "data";
  opt.zero_bias = true;
  opt.durations = {0.5, 1.0};
  opt.out = dir / "out";
  std::ostringstream out;
  const auto reports = cmd_blackout(opt, out);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].updates_in_window, 0u);
  EXPECT_TRUE(fs::exists(dir / "out/blackout.csv"));
  EXPECT_TRUE(fs::exists(dir / "out/blackout_1s.tum"));
}
