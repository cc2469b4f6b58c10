#pragma once

#include <span>
#include <vector>

#include "trajstitch/mlp.hpp"
#include "trajstitch/optimizer.hpp"
#include "trajstitch/schedule.hpp"
#include "trajstitch/trajectory.hpp"

namespace trajstitch {

// Noise predictor over a flattened window. Input row layout:
//   [noisy window (H*d) | condition values, zero at masked (H*d) |
//    observed flags (H) | k/K | (k/K)^2]
// Output row: predicted noise (H*d).
struct DenoiserModel {
  nn::Mlp network;
  int horizon = 0;
  int state_dim = 0;

  int window_width() const { return horizon * state_dim; }
};

int denoiser_input_width(int horizon, int state_dim);

DenoiserModel make_denoiser(int horizon, int state_dim, const std::vector<int>& hidden, Rng& rng);

// Rows are flattened windows; mask rows hold 1 at observed positions.
Matrix condition_values(const Matrix& clean, const Matrix& mask, int state_dim);
Matrix assemble_denoiser_input(const Matrix& noisy, const Matrix& condition, const Matrix& mask,
                               std::span<const int> steps, int total_steps);

// Overwrites observed entries of `windows` with those of `known`.
void project_observed(Matrix& windows, const Matrix& known, const Matrix& mask, int state_dim);

// One minibatch of training windows with the noise and step drawn for each.
struct DiffusionBatch {
  Matrix clean;  // B x H*d, normalized states
  Matrix noise;  // B x H*d
  Matrix mask;   // B x H
  std::vector<int> steps;
};

struct DiffusionLoss {
  double value = 0.0;
  nn::MlpGradients gradients;
};

// ||noise - eps_theta(x_k, condition, k)||^2 averaged over every entry, where
// x_k is the whole window forward-noised to step k.
DiffusionLoss diffusion_loss(const DenoiserModel& model, const NoiseSchedule& schedule,
                             const DiffusionBatch& batch);

struct DenoiserTrainConfig {
  int horizon = 32;
  std::vector<int> hidden{256, 256, 256};
  int steps = 8000;
  int batch_size = 64;
  nn::AdamConfig adam;
  int log_interval = 100;
};

struct DenoiserTrainResult {
  DenoiserModel model;
  std::vector<double> step_losses;
  int windows_available = 0;
  int trajectories_skipped = 0;
};

// `dataset` must already hold normalized states. Trajectories shorter than
// the horizon are skipped with a warning; if none remain, ConfigError.
DenoiserTrainResult train_denoiser(const Dataset& dataset, const NoiseSchedule& schedule,
                                   const DenoiserTrainConfig& config, Rng& rng);

// Trailing moving average.
std::vector<double> smooth_curve(const std::vector<double>& values, int window);

}  // namespace trajstitch
