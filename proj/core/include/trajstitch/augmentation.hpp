#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "trajstitch/aux_models.hpp"
#include "trajstitch/denoiser.hpp"
#include "trajstitch/normalizer.hpp"
#include "trajstitch/schedule.hpp"
#include "trajstitch/trajectory.hpp"

namespace trajstitch {

struct StitchConfig {
  int horizon = 32;
  double delta_threshold = 2.0;
  int iterations = 200;
  int min_keep = 5;
  double low_quantile = 0.5;
  double high_quantile = 0.8;
  double rank_gamma = 1.0;  // pools are ranked by undiscounted return
  std::uint64_t seed = 0;
  int batch_size = 128;     // attempts sampled together through the denoiser

  void validate() const;
};

struct StitchModels {
  const DenoiserModel* denoiser = nullptr;
  const NoiseSchedule* schedule = nullptr;
  const AuxModels* aux = nullptr;
  const NormStats* norm = nullptr;
};

// One stitch attempt carried through generation, wrap-up and scoring. Whether
// it is accepted depends only on max_error and the threshold applied later.
struct StitchCandidate {
  int attempt = 0;
  StitchProvenance provenance;
  double max_error = 0.0;
  std::vector<double> errors;
  std::vector<double> similarity;
  Trajectory stitch;     // delta+2 tuples
  Trajectory generated;  // full augmented trajectory
};

// Every attempt draws from its own stream derived from (seed, attempt index).
std::vector<StitchCandidate> generate_candidates(const Dataset& dataset, const StitchModels& models,
                                                 const StitchConfig& config);

struct AugmentationStats {
  int attempts = 0;
  int accepted = 0;
  double acceptance_rate = 0.0;
  std::map<int, int> delta_histogram;  // over all attempts
  std::vector<double> max_errors;      // per attempt, attempt order
  std::vector<int> accepted_attempts;
};

struct AugmentationResult {
  Dataset augmented;  // may be empty
  AugmentationStats stats;
};

AugmentationResult select_qualified(const std::vector<StitchCandidate>& candidates, double threshold,
                                    const Dataset& source);

// Sample pair, imagine, estimate delta, mask, generate, wrap up, qualify,
// repeated `iterations` times; rejected attempts are skipped.
AugmentationResult run_augmentation(const Dataset& dataset, const StitchModels& models, const StitchConfig& config);

// Nearest-rank quantile of a non-empty sample.
double nearest_rank_quantile(std::vector<double> values, double q);

}  // namespace trajstitch
