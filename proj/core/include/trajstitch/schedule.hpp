#pragma once

#include <vector>

#include "trajstitch/rng.hpp"
#include "trajstitch/tensor.hpp"

namespace trajstitch {

inline constexpr double kCosineOffset = 0.008;
inline constexpr double kAlphaMin = 0.001;
inline constexpr double kAlphaMax = 0.9999;

// Cosine noise schedule over diffusion steps k = 1..K.
class NoiseSchedule {
 public:
  NoiseSchedule() = default;

  int steps() const { return static_cast<int>(alpha_.size()); }
  double offset() const { return offset_; }
  // 1-based step index.
  double alpha(int k) const;
  double alpha_bar(int k) const;

  friend NoiseSchedule build_cosine_schedule(int steps, double offset);

 private:
  std::vector<double> alpha_;
  std::vector<double> alpha_bar_;
  double offset_ = kCosineOffset;
};

// alpha_bar(k) = f(k)/f(0), f(k) = cos^2(((k/K + s)/(1 + s)) * pi/2). Per-step
// alphas are the ratios alpha_bar(k)/alpha_bar(k-1) clipped to
// [kAlphaMin, kAlphaMax]; alpha_bar is then rebuilt as their running product.
NoiseSchedule build_cosine_schedule(int steps, double offset = kCosineOffset);

// sqrt(alpha_bar(k)) * window + sqrt(1 - alpha_bar(k)) * noise, elementwise.
Matrix forward_noise(const Matrix& window, int k, const Matrix& noise, const NoiseSchedule& schedule);

}  // namespace trajstitch
