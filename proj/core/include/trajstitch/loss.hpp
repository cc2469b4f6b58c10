#pragma once

#include "trajstitch/tensor.hpp"

namespace trajstitch::nn {

struct LossResult {
  double value = 0.0;
  Matrix gradient;  // dLoss/dPrediction
};

// Mean over batch and dimensions of the squared residual.
LossResult mse_loss(const Matrix& prediction, const Matrix& target);

}  // namespace trajstitch::nn
