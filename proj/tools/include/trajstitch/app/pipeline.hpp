#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trajstitch/app/run_config.hpp"
#include "trajstitch/augmentation.hpp"
#include "trajstitch/normalizer.hpp"
#include "trajstitch/schedule.hpp"

namespace trajstitch::app {

// Root-seed sub-streams, so each stage can be re-run on its own.
std::uint64_t stage_seed(const RunConfig& config, const char* stage);

// Scenario dataset with its normalizer attached.
Dataset generate_dataset(const RunConfig& config);

struct TrainedModels {
  NoiseSchedule schedule;
  DenoiserTrainResult denoiser;
  AuxModels aux;
  AuxTrainReport aux_report;
};

// `raw` carries states in original units; normalization uses `norm`.
TrainedModels train_models(const RunConfig& config, const Dataset& raw, const NormStats& norm);

std::vector<StitchCandidate> stitch_candidates(const RunConfig& config, const Dataset& raw, const NormStats& norm,
                                               const DenoiserModel& denoiser, const NoiseSchedule& schedule,
                                               const AuxModels& aux);

struct ArmResult {
  std::string label;
  std::vector<double> success;  // per seed
  std::vector<double> returns;  // per seed, mean discounted return
  double success_mean = 0.0;
  double success_std = 0.0;
  double return_mean = 0.0;
  double return_std = 0.0;
};

// Mean and population standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& values);

// Percentile BC at `ratio` over eval.seeds trials. Trial i draws from the same
// streams whatever the ratio, so 1:0 reproduces the raw-data arm exactly.
ArmResult evaluate_arm(const RunConfig& config, const Dataset& raw, const Dataset& augmented, const NormStats& norm,
                       const Ratio& ratio, const std::string& label);

}  // namespace trajstitch::app
