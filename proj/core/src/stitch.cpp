#include "trajstitch/stitch.hpp"

#include <cmath>

#include "trajstitch/diagnostics.hpp"
#include "trajstitch/errors.hpp"
#include "trajstitch/sampler.hpp"

namespace trajstitch {

double cosine_similarity(const RowVector& u, const RowVector& v) {
  if (u.size() != v.size()) throw ShapeError("cosine_similarity: dimension mismatch");
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu < kDegenerateNorm || nv < kDegenerateNorm) {
    warn("cosine similarity of a near-zero vector treated as 0");
    return 0.0;
  }
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

StepEstimate estimate_steps(const Matrix& imagined, const RowVector& target) {
  const int horizon = static_cast<int>(imagined.rows());
  if (horizon < 3) throw ConfigError("estimate_steps needs a horizon of at least 3");
  StepEstimate out;
  out.similarity.reserve(static_cast<std::size_t>(horizon - 2));
  double best = -2.0;
  for (int i = 1; i <= horizon - 2; ++i) {
    const double s = cosine_similarity(imagined.row(i), target);
    out.similarity.push_back(s);
    if (s > best) {
      best = s;
      out.delta = i;
    }
  }
  return out;
}

MaskedWindow build_stitch_mask(const RowVector& end_state, int delta, const Matrix& high_states, int horizon) {
  if (delta < 1 || delta > horizon - 2) {
    throw ConfigError("stitch delta " + std::to_string(delta) + " outside [1, " + std::to_string(horizon - 2) + "]");
  }
  if (high_states.rows() < 1) throw ConfigError("high trajectory supplies no states");
  if (high_states.cols() != end_state.size()) throw ShapeError("build_stitch_mask: dimension mismatch");
  MaskedWindow w;
  w.values = Matrix::Zero(horizon, end_state.size());
  w.observed.assign(static_cast<std::size_t>(horizon), false);
  w.values.row(0) = end_state;
  w.observed[0] = true;
  const int pad = std::min<int>(horizon - 1 - delta, static_cast<int>(high_states.rows()));
  for (int j = 0; j < pad; ++j) {
    w.values.row(delta + 1 + j) = high_states.row(j);
    w.observed[static_cast<std::size_t>(delta + 1 + j)] = true;
  }
  return w;
}

Matrix generate_stitch_states(const DenoiserModel& model, const NoiseSchedule& schedule, const MaskedWindow& mask,
                              int delta, Rng& rng) {
  const Matrix completed = sample_conditional(model, schedule, mask, rng);
  for (int h = 0; h < mask.horizon(); ++h) {
    if (mask.observed[static_cast<std::size_t>(h)] && completed.row(h) != mask.values.row(h)) {
      throw Error("inpainting changed an observed position");
    }
  }
  return completed.middleRows(1, delta);
}

Trajectory wrap_up(const RowVector& end_state, const Matrix& stitch_states, const RowVector& join_state,
                   const RowVector& join_action, double join_reward, const AuxModels& models,
                   const NormStats& norm) {
  const int delta = static_cast<int>(stitch_states.rows());
  const int d = static_cast<int>(end_state.size());
  if (delta < 1) throw ConfigError("wrap_up needs at least one stitching state");
  if (stitch_states.cols() != d || join_state.size() != d || norm.dim() != d ||
      models.inverse.state_dim != d || join_action.size() != models.inverse.action_dim) {
    throw ShapeError("wrap_up: dimension mismatch");
  }
  // Raw chain s_T, s~_1..s~_delta, s'_1.
  Matrix chain(delta + 2, d);
  chain.row(0) = end_state;
  chain.middleRows(1, delta) = stitch_states;
  chain.row(delta + 1) = join_state;
  const Matrix normalized = norm.normalize(chain);

  const Matrix actions = predict_action(models.inverse, normalized.topRows(delta + 1), normalized.bottomRows(delta + 1));
  const Vector rewards = predict_reward(models.reward, normalized.topRows(delta + 1), actions);

  Trajectory out;
  out.source = SourceTag::kAugmented;
  out.states = chain;
  out.actions.resize(delta + 2, actions.cols());
  out.actions.topRows(delta + 1) = actions;
  out.actions.row(delta + 1) = join_action;
  out.rewards.resize(delta + 2);
  out.rewards.head(delta + 1) = rewards;
  out.rewards(delta + 1) = join_reward;
  return out;
}

Qualification qualify(const Trajectory& stitch, const ForwardDynamicsModel& forward, const NormStats& norm,
                      double threshold) {
  const int n = stitch.length() - 1;
  if (n < 1) throw ConfigError("qualify: stitching trajectory too short");
  const Matrix normalized = norm.normalize(stitch.states);
  const Matrix predicted = predict_next_state(forward, normalized.topRows(n), stitch.actions.topRows(n));
  Qualification q;
  q.errors.resize(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    q.errors[static_cast<std::size_t>(t)] = (predicted.row(t) - normalized.row(t + 1)).squaredNorm();
    q.max_error = std::max(q.max_error, q.errors[static_cast<std::size_t>(t)]);
  }
  q.accepted = q.max_error < threshold;
  return q;
}

Trajectory assemble_augmented(const Trajectory& low_prefix, const Trajectory& stitch,
                              const Trajectory& high_suffix) {
  const int head = low_prefix.length() - 1;
  const int mid = stitch.length();
  const int tail = high_suffix.length() - 1;
  const int total = head + mid + tail;
  Trajectory out;
  out.source = SourceTag::kAugmented;
  out.states.resize(total, low_prefix.state_dim());
  out.actions.resize(total, low_prefix.action_dim());
  out.rewards.resize(total);
  out.states.topRows(head) = low_prefix.states.topRows(head);
  out.actions.topRows(head) = low_prefix.actions.topRows(head);
  out.rewards.head(head) = low_prefix.rewards.head(head);
  out.states.middleRows(head, mid) = stitch.states;
  out.actions.middleRows(head, mid) = stitch.actions;
  out.rewards.segment(head, mid) = stitch.rewards;
  out.states.bottomRows(tail) = high_suffix.states.bottomRows(tail);
  out.actions.bottomRows(tail) = high_suffix.actions.bottomRows(tail);
  out.rewards.tail(tail) = high_suffix.rewards.tail(tail);
  return out;
}

}  // namespace trajstitch
