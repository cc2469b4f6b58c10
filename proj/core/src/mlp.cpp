#include "trajstitch/mlp.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "trajstitch/errors.hpp"

namespace trajstitch::nn {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Exact GELU: x * Phi(x).
double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_derivative(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
  const double pdf = kInvSqrt2Pi * std::exp(-0.5 * x * x);
  return cdf + x * pdf;
}

void validate_widths(const std::vector<int>& widths) {
  if (widths.size() < 2) throw ShapeError("mlp needs at least input and output widths");
  for (int w : widths) {
    if (w <= 0) throw ShapeError("mlp layer width must be positive");
  }
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kGelu:
      return "gelu";
    case Activation::kLinear:
      return "linear";
  }
  return "unknown";
}

Activation activation_from_string(const std::string& name) {
  if (name == "gelu") return Activation::kGelu;
  if (name == "linear") return Activation::kLinear;
  throw SchemaError("unknown activation '" + name + "'");
}

void MlpGradients::set_zero() {
  for (auto& l : layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

void MlpGradients::add_scaled(const MlpGradients& other, double scale) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weight += scale * other.layers[i].weight;
    layers[i].bias += scale * other.layers[i].bias;
  }
}

bool MlpGradients::all_finite() const {
  for (const auto& l : layers) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

double MlpGradients::squared_norm() const {
  double s = 0.0;
  for (const auto& l : layers) s += l.weight.squaredNorm() + l.bias.squaredNorm();
  return s;
}

Mlp::Mlp(std::vector<int> widths, Activation hidden, Rng& rng)
    : widths_(std::move(widths)), hidden_(hidden) {
  validate_widths(widths_);
  layers_.reserve(widths_.size() - 1);
  for (std::size_t i = 0; i + 1 < widths_.size(); ++i) {
    const int fan_in = widths_[i];
    const int fan_out = widths_[i + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    DenseLayer layer{Matrix(fan_in, fan_out), RowVector(fan_out)};
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = uniform_real(rng, -bound, bound);
      }
    }
    for (Eigen::Index c = 0; c < layer.bias.size(); ++c) layer.bias(c) = uniform_real(rng, -bound, bound);
    layers_.push_back(std::move(layer));
  }
}

Mlp Mlp::zeros(std::vector<int> widths, Activation hidden) {
  validate_widths(widths);
  Mlp m;
  m.widths_ = std::move(widths);
  m.hidden_ = hidden;
  for (std::size_t i = 0; i + 1 < m.widths_.size(); ++i) {
    m.layers_.push_back(DenseLayer{Matrix::Zero(m.widths_[i], m.widths_[i + 1]),
                                   RowVector::Zero(m.widths_[i + 1])});
  }
  return m;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

bool Mlp::parameters_finite() const {
  for (const auto& l : layers_) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return true;
}

void Mlp::check_input(const Matrix& input) const {
  if (layers_.empty()) throw ShapeError("mlp has no layers");
  if (input.cols() != input_width()) {
    throw ShapeError("mlp input width " + std::to_string(input.cols()) + " != expected " +
                     std::to_string(input_width()));
  }
}

Matrix Mlp::forward(const Matrix& input) const {
  check_input(input);
  Matrix x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Matrix z = x * layers_[i].weight;
    z.rowwise() += layers_[i].bias;
    if (i + 1 < layers_.size() && hidden_ == Activation::kGelu) {
      z = z.unaryExpr([](double v) { return gelu(v); });
    }
    x = std::move(z);
  }
  return x;
}

Matrix Mlp::forward(const Matrix& input, ForwardCache& cache) const {
  check_input(input);
  cache.layer_inputs.clear();
  cache.pre_activations.clear();
  cache.layer_inputs.reserve(layers_.size());
  cache.pre_activations.reserve(layers_.size());
  Matrix x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Matrix z = x * layers_[i].weight;
    z.rowwise() += layers_[i].bias;
    cache.layer_inputs.push_back(std::move(x));
    const bool hidden = i + 1 < layers_.size();
    if (hidden && hidden_ == Activation::kGelu) {
      x = z.unaryExpr([](double v) { return gelu(v); });
      cache.pre_activations.push_back(std::move(z));
    } else {
      x = z;
      cache.pre_activations.push_back(std::move(z));
    }
  }
  return x;
}

MlpGradients Mlp::zero_gradients() const {
  MlpGradients g;
  g.layers.reserve(layers_.size());
  for (const auto& l : layers_) {
    g.layers.push_back(DenseLayer{Matrix::Zero(l.weight.rows(), l.weight.cols()),
                                  RowVector::Zero(l.bias.size())});
  }
  return g;
}

MlpGradients Mlp::backward(const ForwardCache& cache, const Matrix& output_grad,
                           Matrix* input_grad) const {
  if (cache.layer_inputs.size() != layers_.size()) throw ShapeError("forward cache does not match model");
  const Eigen::Index batch = cache.layer_inputs.front().rows();
  if (output_grad.rows() != batch || output_grad.cols() != output_width()) {
    throw ShapeError("output gradient shape mismatch");
  }
  MlpGradients grads;
  grads.layers.resize(layers_.size());
  Matrix delta = output_grad;
  for (std::size_t idx = layers_.size(); idx-- > 0;) {
    const bool hidden = idx + 1 < layers_.size();
    if (hidden && hidden_ == Activation::kGelu) {
      delta = delta.cwiseProduct(
          cache.pre_activations[idx].unaryExpr([](double v) { return gelu_derivative(v); }));
    }
    grads.layers[idx].weight = cache.layer_inputs[idx].transpose() * delta;
    grads.layers[idx].bias = delta.colwise().sum();
    if (idx > 0 || input_grad != nullptr) {
      delta = delta * layers_[idx].weight.transpose();
    }
  }
  if (input_grad != nullptr) *input_grad = std::move(delta);
  return grads;
}

bool operator==(const Mlp& a, const Mlp& b) {
  if (a.widths() != b.widths() || a.hidden_activation() != b.hidden_activation()) return false;
  for (std::size_t i = 0; i < a.layers().size(); ++i) {
    if (a.layers()[i].weight != b.layers()[i].weight) return false;
    if (a.layers()[i].bias != b.layers()[i].bias) return false;
  }
  return true;
}

}  // namespace trajstitch::nn
