#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trajstitch/augmentation.hpp"
#include "trajstitch/aux_models.hpp"
#include "trajstitch/denoiser.hpp"
#include "trajstitch/maze.hpp"
#include "trajstitch/mixing.hpp"
#include "trajstitch/policy.hpp"

namespace trajstitch::app {

// "o:a", both non-negative, not both zero.
struct Ratio {
  int original_parts = 4;
  int augmented_parts = 1;

  std::string label() const;
  bool operator==(const Ratio&) const = default;
};

Ratio parse_ratio(const std::string& text);

struct DataSection {
  std::string scenario = kDisjointFamilies;
  // Empty: <out>/dataset.jsonl.
  std::string dataset_path;
  int n_per_family = 50;
  double goal_radius = 0.2;
  double max_step = 0.15;
  int episode_cap = 100;
  double start_jitter = 0.05;
  double min_family_gap = 1.0;
};

struct DiffusionSection {
  int horizon = 32;
  int diffusion_steps = 100;
  double cosine_offset = 0.008;
  std::vector<int> hidden{256, 256, 256};
  int train_steps = 8000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  int log_interval = 100;
};

struct AuxSection {
  std::vector<int> inverse_hidden{256, 256};
  std::vector<int> dynamics_hidden{256, 256, 256, 256};
  int train_steps = 20000;
  int batch_size = 256;
  double learning_rate = 1e-3;
  int log_interval = 100;
  double validation_fraction = 0.1;
};

struct StitchSection {
  double delta = 2.0;
  int iterations = 200;
  int min_keep = 5;
  double low_quantile = 0.5;
  double high_quantile = 0.8;
  double rank_gamma = 1.0;
  int batch_size = 128;
};

struct EvalSection {
  Ratio ratio;
  int batch_size = 256;
  double percentile = 0.2;
  double return_tolerance = 0.05;
  std::vector<int> hidden{64, 64};
  int train_steps = 3000;
  double learning_rate = 1e-3;
  int seeds = 3;
  int episodes = 50;
  double gamma = 0.99;
};

struct SweepSection {
  std::vector<double> delta_grid{1.0, 2.0, 4.0, 8.0, 16.0};
  std::vector<Ratio> ratio_grid{{0, 1}, {1, 2}, {1, 1}, {2, 1}, {4, 1}, {1, 0}};
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::string out_dir = "run";
  DataSection data;
  DiffusionSection diffusion;
  AuxSection aux;
  StitchSection stitch;
  EvalSection eval;
  SweepSection sweep;

  // Throws ConfigError naming the first offending field.
  void validate() const;

  std::filesystem::path dataset_path() const;
  PointMazeSpec maze() const;
  DisjointFamiliesConfig families() const;
  DenoiserTrainConfig denoiser_config() const;
  AuxTrainConfig aux_config() const;
  StitchConfig stitch_config() const;  // seed left at 0
  BcConfig bc_config() const;
  MixConfig mix(const Ratio& ratio) const;
};

// Canonical JSON form; every field is written, unknown keys are rejected.
std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Applies "dotted.key=value"; the value is parsed as JSON and falls back to a
// plain string. The key must already exist.
void apply_override(RunConfig& config, const std::string& assignment);

// 16 hex digits of the FNV-1a hash of the canonical JSON.
std::string config_hash(const RunConfig& config);

}  // namespace trajstitch::app
