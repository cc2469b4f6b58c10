#include "trajstitch/app/pipeline.hpp"

#include <cmath>

#include "trajstitch/errors.hpp"
#include "trajstitch/rng.hpp"

namespace trajstitch::app {

std::uint64_t stage_seed(const RunConfig& config, const char* stage) { return derive_seed(config.seed, stage); }

Dataset generate_dataset(const RunConfig& config) {
  config.validate();
  Rng rng(stage_seed(config, "data"));
  Dataset ds =
      generate_offline_dataset(config.maze(), config.data.scenario, config.data.n_per_family, rng, config.families());
  ds.norm_stats = fit_normalizer(ds);
  return ds;
}

TrainedModels train_models(const RunConfig& config, const Dataset& raw, const NormStats& norm) {
  config.validate();
  const Dataset normalized = normalized_copy(raw, norm);
  const std::uint64_t seed = stage_seed(config, "train");
  TrainedModels out;
  out.schedule = build_cosine_schedule(config.diffusion.diffusion_steps, config.diffusion.cosine_offset);
  Rng denoiser_rng(derive_seed(seed, "denoiser"));
  out.denoiser = train_denoiser(normalized, out.schedule, config.denoiser_config(), denoiser_rng);
  Rng aux_rng(derive_seed(seed, "aux"));
  out.aux = train_aux_models(normalized, config.aux_config(), aux_rng, &out.aux_report);
  return out;
}

std::vector<StitchCandidate> stitch_candidates(const RunConfig& config, const Dataset& raw, const NormStats& norm,
                                               const DenoiserModel& denoiser, const NoiseSchedule& schedule,
                                               const AuxModels& aux) {
  config.validate();
  if (denoiser.horizon != config.diffusion.horizon) {
    throw ConfigError("denoiser horizon " + std::to_string(denoiser.horizon) + " does not match diffusion.horizon " +
                      std::to_string(config.diffusion.horizon));
  }
  StitchConfig sc = config.stitch_config();
  sc.seed = stage_seed(config, "stitch");
  return generate_candidates(raw, StitchModels{&denoiser, &schedule, &aux, &norm}, sc);
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

ArmResult evaluate_arm(const RunConfig& config, const Dataset& raw, const Dataset& augmented, const NormStats& norm,
                       const Ratio& ratio, const std::string& label) {
  config.validate();
  const std::uint64_t seed = stage_seed(config, "eval");
  const PointMazeSpec spec = config.maze();
  const BcConfig bc = config.bc_config();
  const MixConfig mix = config.mix(ratio);
  ArmResult arm;
  arm.label = label;
  for (int trial = 0; trial < config.eval.seeds; ++trial) {
    const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(trial));
    Rng bc_rng(derive_seed(trial_seed, "bc"));
    const PolicyModel policy = train_percentile_bc(raw, augmented, mix, bc, norm, spec.max_step, bc_rng);
    Rng episode_rng(derive_seed(trial_seed, "episodes"));
    const EvalResult r = evaluate_policy(
        spec, [&policy](const RowVector& s) { return policy.act(s); }, config.eval.episodes, config.eval.gamma,
        episode_rng);
    arm.success.push_back(r.success_rate);
    arm.returns.push_back(r.mean_return);
  }
  std::tie(arm.success_mean, arm.success_std) = mean_std(arm.success);
  std::tie(arm.return_mean, arm.return_std) = mean_std(arm.returns);
  return arm;
}

}  // namespace trajstitch::app
