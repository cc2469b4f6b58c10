#include "trajstitch/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trajstitch/errors.hpp"

namespace trajstitch {

double NoiseSchedule::alpha(int k) const {
  if (k < 1 || k > steps()) throw ConfigError("diffusion step " + std::to_string(k) + " out of range");
  return alpha_[static_cast<std::size_t>(k - 1)];
}

double NoiseSchedule::alpha_bar(int k) const {
  if (k < 1 || k > steps()) throw ConfigError("diffusion step " + std::to_string(k) + " out of range");
  return alpha_bar_[static_cast<std::size_t>(k - 1)];
}

NoiseSchedule build_cosine_schedule(int steps, double offset) {
  if (steps < 2) throw ConfigError("cosine schedule needs at least 2 steps");
  auto f = [&](int k) {
    const double c = std::cos(((static_cast<double>(k) / steps + offset) / (1.0 + offset)) * std::numbers::pi / 2.0);
    return c * c;
  };
  NoiseSchedule s;
  s.offset_ = offset;
  s.alpha_.resize(static_cast<std::size_t>(steps));
  s.alpha_bar_.resize(static_cast<std::size_t>(steps));
  const double f0 = f(0);
  double prev_bar = 1.0;
  double running = 1.0;
  for (int k = 1; k <= steps; ++k) {
    const double bar = f(k) / f0;
    const double a = std::clamp(bar / prev_bar, kAlphaMin, kAlphaMax);
    prev_bar = bar;
    running *= a;
    s.alpha_[static_cast<std::size_t>(k - 1)] = a;
    s.alpha_bar_[static_cast<std::size_t>(k - 1)] = running;
  }
  return s;
}

Matrix forward_noise(const Matrix& window, int k, const Matrix& noise, const NoiseSchedule& schedule) {
  if (window.rows() != noise.rows() || window.cols() != noise.cols()) {
    throw ShapeError("forward_noise: window and noise shapes differ");
  }
  const double bar = schedule.alpha_bar(k);
  return std::sqrt(bar) * window + std::sqrt(1.0 - bar) * noise;
}

}  // namespace trajstitch
