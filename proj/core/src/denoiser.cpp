#include "trajstitch/denoiser.hpp"

#include <cmath>
#include <utility>

#include "trajstitch/diagnostics.hpp"
#include "trajstitch/errors.hpp"
#include "trajstitch/loss.hpp"
#include "trajstitch/masked_window.hpp"

namespace trajstitch {

int denoiser_input_width(int horizon, int state_dim) { return 2 * horizon * state_dim + horizon + 2; }

DenoiserModel make_denoiser(int horizon, int state_dim, const std::vector<int>& hidden, Rng& rng) {
  if (horizon < 4) throw ConfigError("denoiser horizon must be >= 4");
  if (state_dim < 1) throw ConfigError("denoiser state dimension must be positive");
  std::vector<int> widths;
  widths.push_back(denoiser_input_width(horizon, state_dim));
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(horizon * state_dim);
  return DenoiserModel{nn::Mlp(std::move(widths), nn::Activation::kGelu, rng), horizon, state_dim};
}

Matrix condition_values(const Matrix& clean, const Matrix& mask, int state_dim) {
  Matrix cond = clean;
  for (Eigen::Index b = 0; b < cond.rows(); ++b) {
    for (Eigen::Index h = 0; h < mask.cols(); ++h) {
      if (mask(b, h) == 0.0) cond.row(b).segment(h * state_dim, state_dim).setZero();
    }
  }
  return cond;
}

void project_observed(Matrix& windows, const Matrix& known, const Matrix& mask, int state_dim) {
  for (Eigen::Index b = 0; b < windows.rows(); ++b) {
    for (Eigen::Index h = 0; h < mask.cols(); ++h) {
      if (mask(b, h) != 0.0) {
        windows.row(b).segment(h * state_dim, state_dim) = known.row(b).segment(h * state_dim, state_dim);
      }
    }
  }
}

Matrix assemble_denoiser_input(const Matrix& noisy, const Matrix& condition, const Matrix& mask,
                               std::span<const int> steps, int total_steps) {
  const Eigen::Index batch = noisy.rows();
  const Eigen::Index width = noisy.cols();
  if (condition.rows() != batch || condition.cols() != width || mask.rows() != batch ||
      static_cast<Eigen::Index>(steps.size()) != batch) {
    throw ShapeError("denoiser input parts disagree on batch size or width");
  }
  Matrix input(batch, 2 * width + mask.cols() + 2);
  input.leftCols(width) = noisy;
  input.middleCols(width, width) = condition;
  input.middleCols(2 * width, mask.cols()) = mask;
  for (Eigen::Index b = 0; b < batch; ++b) {
    const double t = static_cast<double>(steps[static_cast<std::size_t>(b)]) / total_steps;
    input(b, input.cols() - 2) = t;
    input(b, input.cols() - 1) = t * t;
  }
  return input;
}

DiffusionLoss diffusion_loss(const DenoiserModel& model, const NoiseSchedule& schedule,
                             const DiffusionBatch& batch) {
  const int d = model.state_dim;
  if (batch.clean.cols() != model.window_width() || batch.noise.cols() != model.window_width() ||
      batch.mask.cols() != model.horizon) {
    throw ShapeError("diffusion batch does not match denoiser geometry");
  }
  Matrix noisy(batch.clean.rows(), batch.clean.cols());
  for (Eigen::Index b = 0; b < noisy.rows(); ++b) {
    const double bar = schedule.alpha_bar(batch.steps[static_cast<std::size_t>(b)]);
    noisy.row(b) = std::sqrt(bar) * batch.clean.row(b) + std::sqrt(1.0 - bar) * batch.noise.row(b);
  }
  const Matrix input = assemble_denoiser_input(noisy, condition_values(batch.clean, batch.mask, d), batch.mask,
                                               batch.steps, schedule.steps());
  nn::ForwardCache cache;
  const Matrix predicted = model.network.forward(input, cache);
  nn::LossResult loss = nn::mse_loss(predicted, batch.noise);
  return DiffusionLoss{loss.value, model.network.backward(cache, loss.gradient)};
}

namespace {

struct WindowRef {
  int trajectory;
  int start;
};

}  // namespace

DenoiserTrainResult train_denoiser(const Dataset& dataset, const NoiseSchedule& schedule,
                                   const DenoiserTrainConfig& config, Rng& rng) {
  const int horizon = config.horizon;
  if (horizon < 4) throw ConfigError("denoiser horizon must be >= 4");
  if (config.batch_size < 1 || config.steps < 0) throw ConfigError("invalid denoiser training budget");
  if (dataset.empty()) throw ConfigError("train_denoiser: empty dataset");

  DenoiserTrainResult result;
  std::vector<WindowRef> windows;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int len = dataset.trajectories[i].length();
    if (len < horizon) {
      ++result.trajectories_skipped;
      continue;
    }
    for (int s = 0; s + horizon <= len; ++s) windows.push_back({static_cast<int>(i), s});
  }
  if (result.trajectories_skipped > 0) {
    warn(std::to_string(result.trajectories_skipped) + " trajectories shorter than horizon " +
         std::to_string(horizon) + " skipped for denoiser training");
  }
  if (windows.empty()) throw ConfigError("every trajectory is shorter than the denoiser horizon");
  result.windows_available = static_cast<int>(windows.size());

  const int d = dataset.state_dim;
  result.model = make_denoiser(horizon, d, config.hidden, rng);
  nn::AdamOptimizer optimizer(result.model.network, config.adam);
  result.step_losses.reserve(static_cast<std::size_t>(config.steps));

  const int batch_size = config.batch_size;
  DiffusionBatch batch;
  batch.clean.resize(batch_size, horizon * d);
  batch.noise.resize(batch_size, horizon * d);
  batch.mask.resize(batch_size, horizon);
  batch.steps.resize(static_cast<std::size_t>(batch_size));
  for (int step = 0; step < config.steps; ++step) {
    for (int b = 0; b < batch_size; ++b) {
      const auto& ref = windows[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(windows.size()) - 1))];
      const auto& states = dataset.trajectories[static_cast<std::size_t>(ref.trajectory)].states;
      for (int h = 0; h < horizon; ++h) batch.clean.row(b).segment(h * d, d) = states.row(ref.start + h);
      const auto observed = make_training_mask(horizon, rng);
      for (int h = 0; h < horizon; ++h) batch.mask(b, h) = observed[static_cast<std::size_t>(h)] ? 1.0 : 0.0;
      batch.steps[static_cast<std::size_t>(b)] = uniform_int(rng, 1, schedule.steps());
      for (Eigen::Index c = 0; c < batch.noise.cols(); ++c) batch.noise(b, c) = standard_normal(rng);
    }
    DiffusionLoss loss = diffusion_loss(result.model, schedule, batch);
    if (!std::isfinite(loss.value)) {
      throw TrainingError("non-finite denoiser loss at step " + std::to_string(step + 1));
    }
    optimizer.step(result.model.network, loss.gradients);
    result.step_losses.push_back(loss.value);
  }
  return result;
}

std::vector<double> smooth_curve(const std::vector<double>& values, int window) {
  if (window < 1) throw ConfigError("smoothing window must be positive");
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= static_cast<std::size_t>(window)) sum -= values[i - static_cast<std::size_t>(window)];
    out[i] = sum / static_cast<double>(std::min<std::size_t>(i + 1, static_cast<std::size_t>(window)));
  }
  return out;
}

}  // namespace trajstitch
