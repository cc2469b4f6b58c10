#include "trajstitch/aux_models.hpp"

#include <algorithm>
#include <numeric>

#include "trajstitch/errors.hpp"

namespace trajstitch {
namespace {

std::vector<int> with_io(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> widths{in};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(out);
  return widths;
}

void check_pair(const Matrix& a, const Matrix& b, int a_dim, int b_dim, const char* what) {
  if (a.rows() != b.rows()) throw ShapeError(std::string(what) + ": batch sizes differ");
  if (a.cols() != a_dim || b.cols() != b_dim) throw ShapeError(std::string(what) + ": dimension mismatch");
}

}  // namespace

TransitionTable collect_transitions(const Dataset& dataset) {
  const auto n = static_cast<Eigen::Index>(dataset.transition_count());
  TransitionTable t;
  t.states.resize(n, dataset.state_dim);
  t.actions.resize(n, dataset.action_dim);
  t.rewards.resize(n, 1);
  t.next_states.resize(n, dataset.state_dim);
  Eigen::Index row = 0;
  for (const auto& traj : dataset.trajectories) {
    const int len = traj.length() - 1;
    t.states.middleRows(row, len) = traj.states.topRows(len);
    t.actions.middleRows(row, len) = traj.actions.topRows(len);
    t.rewards.middleRows(row, len) = traj.rewards.head(len);
    t.next_states.middleRows(row, len) = traj.states.bottomRows(len);
    row += len;
  }
  return t;
}

Matrix inverse_inputs(const Matrix& states, const Matrix& next_states) {
  Matrix x(states.rows(), states.cols() + next_states.cols());
  x << states, next_states;
  return x;
}

Matrix state_action_inputs(const Matrix& states, const Matrix& actions) {
  Matrix x(states.rows(), states.cols() + actions.cols());
  x << states, actions;
  return x;
}

AuxModels train_aux_models(const Dataset& dataset, const AuxTrainConfig& config, Rng& rng,
                           AuxTrainReport* report) {
  if (dataset.empty() || dataset.transition_count() == 0) throw ConfigError("train_aux_models: no transitions");
  if (!(config.validation_fraction >= 0.0 && config.validation_fraction < 1.0)) {
    throw ConfigError("validation fraction must lie in [0, 1)");
  }
  const TransitionTable all = collect_transitions(dataset);
  const int n = all.size();
  const int ds = dataset.state_dim;
  const int da = dataset.action_dim;

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  int holdout = static_cast<int>(config.validation_fraction * n);
  if (holdout >= n) holdout = n - 1;
  const std::vector<int> hold_rows(order.begin(), order.begin() + holdout);
  const std::vector<int> train_rows(order.begin() + holdout, order.end());

  auto split = [&](const Matrix& m, const std::vector<int>& rows) { return nn::gather_rows(m, rows); };
  const Matrix s = split(all.states, train_rows), a = split(all.actions, train_rows);
  const Matrix r = split(all.rewards, train_rows), s2 = split(all.next_states, train_rows);

  nn::RegressionConfig reg{config.steps, config.batch_size, config.adam, config.log_interval};

  AuxModels models;
  models.inverse = {nn::Mlp(with_io(2 * ds, config.inverse_hidden, da), nn::Activation::kGelu, rng), ds, da};
  models.reward = {nn::Mlp(with_io(ds + da, config.dynamics_hidden, 1), nn::Activation::kGelu, rng), ds, da};
  models.forward = {nn::Mlp(with_io(ds + da, config.dynamics_hidden, ds), nn::Activation::kGelu, rng), ds, da};

  const Matrix inv_x = inverse_inputs(s, s2);
  const Matrix sa_x = state_action_inputs(s, a);
  auto inv_fit = nn::fit_regression(models.inverse.network, inv_x, a, reg, rng);
  auto rew_fit = nn::fit_regression(models.reward.network, sa_x, r, reg, rng);
  auto fwd_fit = nn::fit_regression(models.forward.network, sa_x, s2, reg, rng);

  if (report != nullptr) {
    report->inverse_curve = std::move(inv_fit.loss_curve);
    report->reward_curve = std::move(rew_fit.loss_curve);
    report->forward_curve = std::move(fwd_fit.loss_curve);
    report->train_transitions = static_cast<int>(train_rows.size());
    report->holdout_transitions = holdout;
    if (holdout > 0) {
      const Matrix hs = split(all.states, hold_rows), ha = split(all.actions, hold_rows);
      const Matrix hr = split(all.rewards, hold_rows), hs2 = split(all.next_states, hold_rows);
      report->inverse_holdout_mse = nn::evaluate_mse(models.inverse.network, inverse_inputs(hs, hs2), ha);
      report->reward_holdout_mse = nn::evaluate_mse(models.reward.network, state_action_inputs(hs, ha), hr);
      report->forward_holdout_mse = nn::evaluate_mse(models.forward.network, state_action_inputs(hs, ha), hs2);
    }
  }
  return models;
}

Matrix predict_action(const InverseDynamicsModel& model, const Matrix& states, const Matrix& next_states) {
  check_pair(states, next_states, model.state_dim, model.state_dim, "predict_action");
  return model.network.forward(inverse_inputs(states, next_states));
}

Vector predict_reward(const RewardModel& model, const Matrix& states, const Matrix& actions) {
  check_pair(states, actions, model.state_dim, model.action_dim, "predict_reward");
  return model.network.forward(state_action_inputs(states, actions)).col(0);
}

Matrix predict_next_state(const ForwardDynamicsModel& model, const Matrix& states, const Matrix& actions) {
  check_pair(states, actions, model.state_dim, model.action_dim, "predict_next_state");
  return model.network.forward(state_action_inputs(states, actions));
}

}  // namespace trajstitch
