#pragma once

#include <vector>

#include "trajstitch/mlp.hpp"
#include "trajstitch/optimizer.hpp"

namespace trajstitch::nn {

struct RegressionConfig {
  int steps = 2000;
  int batch_size = 128;
  AdamConfig adam;
  int log_interval = 100;
};

struct RegressionResult {
  // Mean minibatch loss over each logging interval.
  std::vector<double> loss_curve;
};

// One MSE minibatch step. Returns the loss before the update.
double regression_step(Mlp& model, AdamOptimizer& optimizer, const Matrix& inputs,
                       const Matrix& targets);

RegressionResult fit_regression(Mlp& model, const Matrix& inputs, const Matrix& targets,
                                const RegressionConfig& config, Rng& rng);

double evaluate_mse(const Mlp& model, const Matrix& inputs, const Matrix& targets);

// Gathers the given rows.
Matrix gather_rows(const Matrix& source, const std::vector<int>& rows);

}  // namespace trajstitch::nn
