#include "trajstitch/sampler.hpp"

#include <cmath>

#include "trajstitch/errors.hpp"

namespace trajstitch {

std::vector<Matrix> sample_conditional_batch(const DenoiserModel& model, const NoiseSchedule& schedule,
                                             std::span<const MaskedWindow> windows, std::span<Rng> rngs) {
  if (windows.size() != rngs.size()) throw ConfigError("sample_conditional_batch: one rng per window required");
  const int horizon = model.horizon;
  const int d = model.state_dim;
  const auto batch = static_cast<Eigen::Index>(windows.size());
  if (batch == 0) return {};

  Matrix known(batch, horizon * d);
  Matrix mask(batch, horizon);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto& w = windows[static_cast<std::size_t>(b)];
    w.validate();
    if (w.horizon() != horizon || w.state_dim() != d) throw ShapeError("masked window does not match denoiser");
    for (int h = 0; h < horizon; ++h) {
      const bool obs = w.observed[static_cast<std::size_t>(h)];
      mask(b, h) = obs ? 1.0 : 0.0;
      if (obs) {
        known.row(b).segment(h * d, d) = w.values.row(h);
      } else {
        known.row(b).segment(h * d, d).setZero();
      }
    }
  }
  const Matrix condition = known;

  Matrix x(batch, horizon * d);
  for (Eigen::Index b = 0; b < batch; ++b) {
    auto& rng = rngs[static_cast<std::size_t>(b)];
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(b, c) = standard_normal(rng);
  }
  project_observed(x, known, mask, d);

  const int total = schedule.steps();
  std::vector<int> steps(static_cast<std::size_t>(batch));
  for (int k = total; k >= 1; --k) {
    std::fill(steps.begin(), steps.end(), k);
    const Matrix eps = model.network.forward(assemble_denoiser_input(x, condition, mask, steps, total));
    const double a = schedule.alpha(k);
    const double bar = schedule.alpha_bar(k);
    x = (x - ((1.0 - a) / std::sqrt(1.0 - bar)) * eps) / std::sqrt(a);
    if (k > 1) {
      const double sigma = std::sqrt(1.0 - a);
      for (Eigen::Index b = 0; b < batch; ++b) {
        auto& rng = rngs[static_cast<std::size_t>(b)];
        for (Eigen::Index c = 0; c < x.cols(); ++c) x(b, c) += sigma * standard_normal(rng);
      }
    }
    project_observed(x, known, mask, d);
  }

  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(batch));
  for (Eigen::Index b = 0; b < batch; ++b) {
    Matrix w(horizon, d);
    for (int h = 0; h < horizon; ++h) w.row(h) = x.row(b).segment(h * d, d);
    out.push_back(std::move(w));
  }
  return out;
}

Matrix sample_conditional(const DenoiserModel& model, const NoiseSchedule& schedule, const MaskedWindow& masked,
                          Rng& rng) {
  Rng local = rng;
  auto out = sample_conditional_batch(model, schedule, std::span<const MaskedWindow>(&masked, 1),
                                      std::span<Rng>(&local, 1));
  rng = local;
  return std::move(out.front());
}

MaskedWindow rollout_mask(const RowVector& start_state, int horizon) {
  MaskedWindow w;
  w.values = Matrix::Zero(horizon, start_state.size());
  w.values.row(0) = start_state;
  w.observed.assign(static_cast<std::size_t>(horizon), false);
  w.observed[0] = true;
  return w;
}

Matrix imagine_rollout(const DenoiserModel& model, const NoiseSchedule& schedule, const RowVector& start_state,
                       Rng& rng) {
  if (start_state.size() != model.state_dim) throw ShapeError("imagine_rollout: start state dimension mismatch");
  return sample_conditional(model, schedule, rollout_mask(start_state, model.horizon), rng);
}

}  // namespace trajstitch
