#pragma once

#include <vector>

#include "trajstitch/mlp.hpp"
#include "trajstitch/training.hpp"
#include "trajstitch/trajectory.hpp"

namespace trajstitch {

// All three models read normalized states. Actions and rewards stay in raw
// units; the forward model predicts the normalized next state.

// (s_t, s_{t+1}) -> a_t
struct InverseDynamicsModel {
  nn::Mlp network;
  int state_dim = 0;
  int action_dim = 0;
};

// (s_t, a_t) -> r_t
struct RewardModel {
  nn::Mlp network;
  int state_dim = 0;
  int action_dim = 0;
};

// (s_t, a_t) -> s_{t+1}
struct ForwardDynamicsModel {
  nn::Mlp network;
  int state_dim = 0;
  int action_dim = 0;
};

struct AuxModels {
  InverseDynamicsModel inverse;
  RewardModel reward;
  ForwardDynamicsModel forward;
};

struct AuxTrainConfig {
  std::vector<int> inverse_hidden{256, 256};
  std::vector<int> dynamics_hidden{256, 256, 256, 256};  // reward and forward models
  int steps = 20000;
  int batch_size = 256;
  nn::AdamConfig adam;
  int log_interval = 100;
  double validation_fraction = 0.1;
};

struct AuxTrainReport {
  std::vector<double> inverse_curve;
  std::vector<double> reward_curve;
  std::vector<double> forward_curve;
  double inverse_holdout_mse = 0.0;
  double reward_holdout_mse = 0.0;
  double forward_holdout_mse = 0.0;
  int train_transitions = 0;
  int holdout_transitions = 0;
};

// Consecutive (s_t, a_t, r_t, s_{t+1}) tuples, states normalized.
struct TransitionTable {
  Matrix states;
  Matrix actions;
  Matrix rewards;  // n x 1
  Matrix next_states;

  int size() const { return static_cast<int>(states.rows()); }
};

TransitionTable collect_transitions(const Dataset& normalized_dataset);

Matrix inverse_inputs(const Matrix& states, const Matrix& next_states);
Matrix state_action_inputs(const Matrix& states, const Matrix& actions);

// `dataset` must hold normalized states. 90/10 split by transition; the
// split, batches and init all draw from rng.
AuxModels train_aux_models(const Dataset& dataset, const AuxTrainConfig& config, Rng& rng,
                           AuxTrainReport* report = nullptr);

// Row-batched predictions; single rows are 1-row matrices.
Matrix predict_action(const InverseDynamicsModel& model, const Matrix& states, const Matrix& next_states);
Vector predict_reward(const RewardModel& model, const Matrix& states, const Matrix& actions);
Matrix predict_next_state(const ForwardDynamicsModel& model, const Matrix& states, const Matrix& actions);

}  // namespace trajstitch
