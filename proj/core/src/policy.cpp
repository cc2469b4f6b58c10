#include "trajstitch/policy.hpp"

#include <algorithm>
#include <cmath>

#include "trajstitch/diagnostics.hpp"
#include "trajstitch/errors.hpp"
#include "trajstitch/loss.hpp"
#include "trajstitch/returns.hpp"

namespace trajstitch {

RowVector PolicyModel::act(const RowVector& state) const {
  const Matrix in = norm.normalize(state);
  return clip_norm(network.forward(in).row(0), max_step);
}

TopPercentile select_top_percentile(const Dataset& original, const Dataset& augmented, double percentile,
                                    double rank_gamma, double tolerance) {
  if (!(percentile > 0.0 && percentile <= 1.0)) throw ConfigError("percentile must lie in (0, 1]");
  if (tolerance < 0.0) throw ConfigError("return tolerance must be non-negative");
  std::vector<double> orig_returns, aug_returns;
  for (const auto& t : original.trajectories) orig_returns.push_back(compute_returns(t, rank_gamma).total);
  for (const auto& t : augmented.trajectories) aug_returns.push_back(compute_returns(t, rank_gamma).total);
  std::vector<double> all = orig_returns;
  all.insert(all.end(), aug_returns.begin(), aug_returns.end());
  if (all.empty()) throw ConfigError("percentile selection over an empty dataset");
  std::sort(all.begin(), all.end(), std::greater<>());
  const auto n = all.size();
  auto keep = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(n) - 1e-9));
  keep = std::clamp<std::size_t>(keep, 1, n);

  TopPercentile out;
  out.threshold = all[keep - 1] - tolerance * (all.front() - all.back());
  for (std::size_t i = 0; i < orig_returns.size(); ++i) {
    if (orig_returns[i] >= out.threshold) out.original.push_back(static_cast<int>(i));
  }
  for (std::size_t i = 0; i < aug_returns.size(); ++i) {
    if (aug_returns[i] >= out.threshold) out.augmented.push_back(static_cast<int>(i));
  }
  return out;
}

PolicyModel train_percentile_bc(const Dataset& original, const Dataset& augmented, const MixConfig& mix,
                                const BcConfig& config, const NormStats& norm, double max_step, Rng& rng) {
  mix.validate();
  if (config.steps < 0) throw ConfigError("bc steps must be non-negative");
  // An arm that never samples a pool does not rank it either.
  const Dataset empty{{}, original.state_dim, original.action_dim, std::nullopt};
  const Dataset& orig_src = mix.original_count() > 0 ? original : empty;
  const Dataset& aug_src = mix.augmented_count() > 0 ? augmented : empty;
  if (orig_src.empty() && aug_src.empty()) throw ConfigError("percentile bc: every sampled pool is empty");
  TopPercentile top =
      select_top_percentile(orig_src, aug_src, config.percentile, config.rank_gamma, config.return_tolerance);
  // A sampled source that the joint cut left empty falls back to its own top fraction.
  if (top.original.empty() && !orig_src.empty()) {
    warn("no original trajectory in the joint top percentile; using the original set's own top percentile");
    top.original =
        select_top_percentile(orig_src, empty, config.percentile, config.rank_gamma, config.return_tolerance).original;
  }
  if (top.augmented.empty() && !aug_src.empty()) {
    warn("no augmented trajectory in the joint top percentile; using the augmented set's own top percentile");
    top.augmented =
        select_top_percentile(empty, aug_src, config.percentile, config.rank_gamma, config.return_tolerance).augmented;
  }
  const StateActionPool orig_pool = make_pool(orig_src, top.original);
  const StateActionPool aug_pool = make_pool(aug_src, top.augmented);

  const int ds = original.state_dim;
  const int da = original.action_dim;
  std::vector<int> widths{ds};
  widths.insert(widths.end(), config.hidden.begin(), config.hidden.end());
  widths.push_back(da);

  PolicyModel policy{nn::Mlp(widths, nn::Activation::kGelu, rng), norm, max_step, config.percentile};
  nn::AdamOptimizer optimizer(policy.network, config.adam);
  for (int step = 0; step < config.steps; ++step) {
    const TransitionBatch batch = mixed_batch_sampler(orig_pool, aug_pool, mix, rng);
    nn::ForwardCache cache;
    const Matrix pred = policy.network.forward(norm.normalize(batch.states), cache);
    const nn::LossResult loss = nn::mse_loss(pred, batch.actions);
    if (!std::isfinite(loss.value)) throw TrainingError("non-finite behavior cloning loss");
    optimizer.step(policy.network, policy.network.backward(cache, loss.gradient));
  }
  return policy;
}

EvalResult evaluate_policy(const PointMazeSpec& spec, const PolicyFn& policy, int episodes, double gamma, Rng& rng) {
  if (episodes < 1) throw ConfigError("evaluation needs at least one episode");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("discount must lie in (0, 1]");
  spec.validate();
  EvalResult out;
  out.episodes = episodes;
  int successes = 0;
  double return_sum = 0.0;
  for (int e = 0; e < episodes; ++e) {
    RowVector s = spec.start;
    for (Eigen::Index k = 0; k < s.size(); ++k) s(k) += uniform_real(rng, -spec.start_jitter, spec.start_jitter);
    s = s.cwiseMax(spec.lower).cwiseMin(spec.upper);
    double discount = 1.0;
    double ret = 0.0;
    for (int t = 0; t < spec.episode_cap; ++t) {
      const StepResult step = env_step(spec, s, policy(s));
      ret += discount * step.reward;
      discount *= gamma;
      s = step.next_state;
      if (step.done) {
        ++successes;
        break;
      }
    }
    return_sum += ret;
  }
  out.success_rate = static_cast<double>(successes) / episodes;
  out.mean_return = return_sum / episodes;
  return out;
}

PolicyFn oracle_policy(const PointMazeSpec& spec) {
  return [spec](const RowVector& s) { return clip_norm(spec.goal - s, spec.max_step); };
}

PolicyFn zero_policy(int action_dim) {
  return [action_dim](const RowVector&) { return RowVector::Zero(action_dim).eval(); };
}

}  // namespace trajstitch
