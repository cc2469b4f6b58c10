#include "trajstitch/optimizer.hpp"

#include <cmath>

#include "trajstitch/errors.hpp"

namespace trajstitch::nn {

AdamOptimizer::AdamOptimizer(const Mlp& model, AdamConfig config)
    : config_(config), first_moment_(model.zero_gradients()), second_moment_(model.zero_gradients()) {}

void AdamOptimizer::step(Mlp& model, const MlpGradients& grads) {
  if (grads.layers.size() != model.layers().size()) throw ShapeError("gradient/model layer count mismatch");
  for (std::size_t i = 0; i < grads.layers.size(); ++i) {
    if (grads.layers[i].weight.rows() != model.layers()[i].weight.rows() ||
        grads.layers[i].weight.cols() != model.layers()[i].weight.cols() ||
        grads.layers[i].bias.size() != model.layers()[i].bias.size()) {
      throw ShapeError("gradient/parameter shape mismatch in layer " + std::to_string(i));
    }
  }
  if (!grads.all_finite()) {
    throw TrainingError("non-finite gradient at optimizer step " + std::to_string(steps_ + 1));
  }

  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  const double lr = config_.learning_rate;
  const double eps = config_.epsilon;

  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / correction1) / ((v.array() / correction2).sqrt() + eps);
  };

  for (std::size_t i = 0; i < grads.layers.size(); ++i) {
    auto& layer = model.layers()[i];
    update(layer.weight, first_moment_.layers[i].weight, second_moment_.layers[i].weight,
           grads.layers[i].weight);
    update(layer.bias, first_moment_.layers[i].bias, second_moment_.layers[i].bias,
           grads.layers[i].bias);
  }
}

}  // namespace trajstitch::nn
