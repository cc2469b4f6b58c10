#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "trajstitch/app/run_config.hpp"

namespace trajstitch::app {

// Artifact names inside the output directory.
inline constexpr const char* kConfigFile = "config.json";
inline constexpr const char* kDenoiserFile = "denoiser.json";
inline constexpr const char* kInverseFile = "inv_dyn.json";
inline constexpr const char* kRewardFile = "reward.json";
inline constexpr const char* kForwardFile = "fwd_dyn.json";
inline constexpr const char* kDenoiserLossFile = "denoiser_loss.csv";
inline constexpr const char* kAuxLossFile = "aux_loss.csv";
inline constexpr const char* kTrainSummaryFile = "train_summary.json";
inline constexpr const char* kAugmentedFile = "d_aug.jsonl";
inline constexpr const char* kStitchStatsFile = "stitch_stats.json";
inline constexpr const char* kEvalReportFile = "eval_report.json";
inline constexpr const char* kFigure4File = "figure4.csv";

enum class SweepParam { kDelta, kRatio };

// Each command validates the config, creates the output directory, writes the
// resolved config next to its artifacts and prints a short summary to `out`.
void cmd_gen_data(const RunConfig& config, std::ostream& out);
void cmd_train(const RunConfig& config, std::ostream& out);
void cmd_stitch(const RunConfig& config, std::ostream& out);
void cmd_eval(const RunConfig& config, std::ostream& out);
void cmd_sweep(const RunConfig& config, SweepParam param, std::ostream& out);
void cmd_run_all(const RunConfig& config, std::ostream& out);

// Parses arguments, dispatches, and maps failures to exit codes: 0 success,
// 1 configuration or usage error, 2 runtime or training failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trajstitch::app
