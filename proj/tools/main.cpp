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

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "invio/error.hpp"

namespace {

using namespace invio::cli;

void add_bias_flags(CLI::App* cmd, fs::path& checkpoint, bool& zero_bias) {
  auto* ck = cmd->add_option("--checkpoint", checkpoint, "Trained bias network");
  auto* zb = cmd->add_flag("--zero-bias", zero_bias, "Subtract no bias (baseline)");
  ck->excludes(zb);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned-bias invariant MSCKF visual-inertial odometry"};
  app.require_subcommand(1);

  SimulateOptions sim;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset");
  simulate->add_option("--spec", sim.spec, "Trajectory spec (JSON)")->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "Output directory")->required();
  auto* seed_opt = simulate->add_option("--seed", sim_seed, "Override the trajectory seed");

  TrainOptions tr;
  int epochs = 0;
  auto* train = app.add_subcommand("train", "Train the bias network");
  train->add_option("--train", tr.train_dirs, "Training dataset directories")->required();
  train->add_option("--val", tr.validation_dirs, "Validation dataset directories");
  train->add_option("--config", tr.config, "Run config (JSON)")->check(CLI::ExistingFile);
  train->add_option("--out", tr.checkpoint_out, "Checkpoint to write")->required();
  train->add_option("--loss-trace", tr.loss_trace, "Per-epoch loss CSV (default <out>.loss.csv)");
  train->add_option("--resume", tr.resume, "Continue from this checkpoint")->check(CLI::ExistingFile);
  auto* epochs_opt = train->add_option("--epochs", epochs, "Override training.epochs");

  RunOptions run;
  auto* runcmd = app.add_subcommand("run", "Run the filter on a dataset");
  runcmd->add_option("dataset", run.dataset, "EuRoC-layout directory")->required();
  add_bias_flags(runcmd, run.checkpoint, run.zero_bias);
  runcmd->add_option("--config", run.config, "Run config (JSON)")->check(CLI::ExistingFile);
  runcmd->add_option("--tracks", run.tracks, "Feature tracks file (default <dataset>/tracks.txt)");
  runcmd->add_option("--out", run.out, "Output directory")->required();

  EvalOptions ev;
  std::string alignment = "posyaw";
  auto* eval = app.add_subcommand("eval", "ATE and RE of a trajectory");
  eval->add_option("estimate", ev.estimate, "Estimated trajectory (TUM)")->required()->check(CLI::ExistingFile);
  eval->add_option("groundtruth", ev.ground_truth, "Ground truth (TUM file or EuRoC directory)")
      ->required()
      ->check(CLI::ExistingPath);
  eval->add_option("--align", alignment, "none | se3 | posyaw");
  eval->add_option("--fractions", ev.relative.fractions, "RE sub-trajectory fractions");
  eval->add_option("--reference-distance", ev.relative.reference_distance,
                   "Distance the fractions refer to, m (default: ground-truth length)");
  eval->add_option("--tolerance", ev.relative.tolerance, "Association tolerance, s (default: half period)");
  eval->add_option("--json", ev.json_out, "Also write the report as JSON");

  BlackoutOptions bo;
  double start = 0.0;
  std::string bo_alignment = "posyaw";
  auto* blackout = app.add_subcommand("blackout", "Camera-blackout experiment");
  blackout->add_option("dataset", bo.dataset, "EuRoC-layout directory")->required();
  add_bias_flags(blackout, bo.checkpoint, bo.zero_bias);
  blackout->add_option("--config", bo.config, "Run config (JSON)")->check(CLI::ExistingFile);
  blackout->add_option("--tracks", bo.tracks, "Feature tracks file");
  blackout->add_option("--durations", bo.durations, "Blackout durations, s");
  auto* start_opt = blackout->add_option("--start", start, "Blackout start, s after the first IMU sample");
  blackout->add_option("--align", bo_alignment, "none | se3 | posyaw");
  blackout->add_option("--out", bo.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*simulate) {
      if (*seed_opt) sim.seed = sim_seed;
      cmd_simulate(sim);
      std::cout << "wrote " << sim.out.string() << '\n';
    } else if (*train) {
      if (*epochs_opt) tr.epochs = epochs;
      cmd_train(tr, std::cout);
    } else if (*runcmd) {
      cmd_run(run, std::cout);
    } else if (*eval) {
      ev.alignment = invio::parse_alignment(alignment);
      cmd_eval(ev, std::cout);
    } else if (*blackout) {
      if (*start_opt) bo.start = start;
      bo.alignment = invio::parse_alignment(bo_alignment);
      cmd_blackout(bo, std::cout);
    }
  } catch (const invio::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOk;
}
