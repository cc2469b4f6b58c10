#pragma once

#include <cstdint>

#include "trajstitch/mlp.hpp"

namespace trajstitch::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected first/second moment update.
class AdamOptimizer {
 public:
  AdamOptimizer(const Mlp& model, AdamConfig config);

  // Throws TrainingError on a non-finite gradient; the model is untouched then.
  void step(Mlp& model, const MlpGradients& grads);

  std::int64_t step_count() const { return steps_; }
  const AdamConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

 private:
  AdamConfig config_;
  MlpGradients first_moment_;
  MlpGradients second_moment_;
  std::int64_t steps_ = 0;
};

}  // namespace trajstitch::nn
