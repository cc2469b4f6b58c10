#include "trajstitch/training.hpp"

#include <cmath>
#include <numeric>

#include "trajstitch/errors.hpp"
#include "trajstitch/loss.hpp"

namespace trajstitch::nn {

Matrix gather_rows(const Matrix& source, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), source.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = source.row(rows[i]);
  return out;
}

double regression_step(Mlp& model, AdamOptimizer& optimizer, const Matrix& inputs,
                       const Matrix& targets) {
  ForwardCache cache;
  Matrix pred = model.forward(inputs, cache);
  LossResult loss = mse_loss(pred, targets);
  if (!std::isfinite(loss.value)) {
    throw TrainingError("non-finite regression loss at step " + std::to_string(optimizer.step_count() + 1));
  }
  optimizer.step(model, model.backward(cache, loss.gradient));
  return loss.value;
}

RegressionResult fit_regression(Mlp& model, const Matrix& inputs, const Matrix& targets,
                                const RegressionConfig& config, Rng& rng) {
  if (inputs.rows() != targets.rows()) throw ShapeError("fit_regression: input/target row mismatch");
  if (inputs.rows() == 0) throw ConfigError("fit_regression: no training rows");
  if (config.steps < 0 || config.batch_size <= 0 || config.log_interval <= 0) {
    throw ConfigError("fit_regression: invalid step/batch/log settings");
  }
  AdamOptimizer optimizer(model, config.adam);
  RegressionResult result;
  const int n = static_cast<int>(inputs.rows());
  std::vector<int> rows(static_cast<std::size_t>(config.batch_size));
  double window_sum = 0.0;
  int window_count = 0;
  for (int step = 0; step < config.steps; ++step) {
    for (auto& r : rows) r = uniform_int(rng, 0, n - 1);
    window_sum += regression_step(model, optimizer, gather_rows(inputs, rows), gather_rows(targets, rows));
    if (++window_count == config.log_interval) {
      result.loss_curve.push_back(window_sum / window_count);
      window_sum = 0.0;
      window_count = 0;
    }
  }
  if (window_count > 0) result.loss_curve.push_back(window_sum / window_count);
  return result;
}

double evaluate_mse(const Mlp& model, const Matrix& inputs, const Matrix& targets) {
  return mse_loss(model.forward(inputs), targets).value;
}

}  // namespace trajstitch::nn
