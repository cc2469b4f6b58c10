#include "trajstitch/loss.hpp"

#include "trajstitch/errors.hpp"

namespace trajstitch::nn {

LossResult mse_loss(const Matrix& prediction, const Matrix& target) {
  if (prediction.rows() != target.rows() || prediction.cols() != target.cols()) {
    throw ShapeError("mse_loss: prediction and target shapes differ");
  }
  const double count = static_cast<double>(prediction.size());
  if (count == 0) throw ShapeError("mse_loss: empty batch");
  Matrix residual = prediction - target;
  LossResult out;
  out.value = residual.squaredNorm() / count;
  out.gradient = (2.0 / count) * residual;
  return out;
}

}  // namespace trajstitch::nn
