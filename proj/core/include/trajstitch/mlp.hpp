#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "trajstitch/rng.hpp"
#include "trajstitch/tensor.hpp"

namespace trajstitch::nn {

enum class Activation { kGelu, kLinear };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

// y = x * weight + bias, weight is (fan_in x fan_out).
struct DenseLayer {
  Matrix weight;
  RowVector bias;
};

// Same layout as the model parameters.
struct MlpGradients {
  std::vector<DenseLayer> layers;

  void set_zero();
  void add_scaled(const MlpGradients& other, double scale);
  bool all_finite() const;
  double squared_norm() const;
};

// Activations recorded by forward() for a subsequent backward().
struct ForwardCache {
  std::vector<Matrix> layer_inputs;
  std::vector<Matrix> pre_activations;
};

// Fully connected network with a shared hidden activation and a linear
// output layer. Rows of the input matrix are independent samples.
class Mlp {
 public:
  Mlp() = default;

  // Fan-in scaled uniform init: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
  Mlp(std::vector<int> widths, Activation hidden, Rng& rng);

  static Mlp zeros(std::vector<int> widths, Activation hidden);

  int input_width() const { return widths_.front(); }
  int output_width() const { return widths_.back(); }
  const std::vector<int>& widths() const { return widths_; }
  Activation hidden_activation() const { return hidden_; }

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::size_t parameter_count() const;
  bool parameters_finite() const;

  Matrix forward(const Matrix& input) const;
  Matrix forward(const Matrix& input, ForwardCache& cache) const;

  // Gradients of a scalar loss given dLoss/dOutput. The optional input
  // gradient is filled with dLoss/dInput.
  MlpGradients backward(const ForwardCache& cache, const Matrix& output_grad,
                        Matrix* input_grad = nullptr) const;

  MlpGradients zero_gradients() const;

 private:
  void check_input(const Matrix& input) const;

  std::vector<int> widths_;
  Activation hidden_ = Activation::kGelu;
  std::vector<DenseLayer> layers_;
};

bool operator==(const Mlp& a, const Mlp& b);

}  // namespace trajstitch::nn
