#include "trajstitch/app/commands.hpp"

#include <filesystem>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "trajstitch/app/pipeline.hpp"
#include "trajstitch/checkpoint.hpp"
#include "trajstitch/diagnostics.hpp"
#include "trajstitch/errors.hpp"
#include "trajstitch/io_util.hpp"
#include "trajstitch/report.hpp"
#include "trajstitch/returns.hpp"

namespace trajstitch::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path prepare_output(const RunConfig& config) {
  config.validate();
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  write_text_file_atomic(dir / kConfigFile, config_to_json(config));
  return dir;
}

void write_json(const fs::path& path, const json& j) { write_text_file_atomic(path, j.dump(2) + "\n"); }

json run_header(const RunConfig& config) {
  return json{{"seed", config.seed}, {"config_hash", config_hash(config)}};
}

Dataset load_raw(const RunConfig& config, NormStats& norm) {
  const fs::path path = config.dataset_path();
  if (!fs::exists(path)) throw ConfigError("dataset not found: " + path.string() + " (run gen-data first)");
  Dataset ds = load_dataset(path);
  norm = ds.norm_stats ? *ds.norm_stats : fit_normalizer(ds);
  return ds;
}

nn::Checkpoint load_required(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("checkpoint not found: " + path.string() + " (run train first)");
  return nn::load_checkpoint(path);
}

double meta(const nn::Checkpoint& ckpt, const char* key) {
  auto it = ckpt.metadata.find(key);
  if (it == ckpt.metadata.end()) throw SchemaError(ckpt.kind + " checkpoint lacks metadata '" + key + "'");
  return it->second;
}

void expect_kind(const nn::Checkpoint& ckpt, const char* kind, const fs::path& path) {
  if (ckpt.kind != kind) {
    throw SchemaError(path.string() + " holds a '" + ckpt.kind + "' checkpoint, expected '" + kind + "'");
  }
}

struct LoadedModels {
  DenoiserModel denoiser;
  NoiseSchedule schedule;
  AuxModels aux;
};

LoadedModels load_models(const RunConfig& config) {
  const fs::path dir(config.out_dir);
  const fs::path paths[] = {dir / kDenoiserFile, dir / kInverseFile, dir / kRewardFile, dir / kForwardFile};
  nn::Checkpoint den = load_required(paths[0]);
  nn::Checkpoint inv = load_required(paths[1]);
  nn::Checkpoint rew = load_required(paths[2]);
  nn::Checkpoint fwd = load_required(paths[3]);
  expect_kind(den, "denoiser", paths[0]);
  expect_kind(inv, "inverse_dynamics", paths[1]);
  expect_kind(rew, "reward", paths[2]);
  expect_kind(fwd, "forward_dynamics", paths[3]);
  const int ds = static_cast<int>(meta(inv, "state_dim"));
  const int da = static_cast<int>(meta(inv, "action_dim"));
  LoadedModels m{
      DenoiserModel{std::move(den.model), static_cast<int>(meta(den, "horizon")),
                    static_cast<int>(meta(den, "state_dim"))},
      build_cosine_schedule(static_cast<int>(meta(den, "diffusion_steps")), meta(den, "cosine_offset")),
      AuxModels{InverseDynamicsModel{std::move(inv.model), ds, da}, RewardModel{std::move(rew.model), ds, da},
                ForwardDynamicsModel{std::move(fwd.model), ds, da}},
  };
  if (m.denoiser.network.input_width() != denoiser_input_width(m.denoiser.horizon, m.denoiser.state_dim)) {
    throw SchemaError("denoiser checkpoint widths do not match its horizon");
  }
  return m;
}

Dataset load_augmented(const RunConfig& config, const Dataset& raw) {
  const fs::path path = fs::path(config.out_dir) / kAugmentedFile;
  if (!fs::exists(path)) throw ConfigError("augmented dataset not found: " + path.string() + " (run stitch first)");
  if (fs::file_size(path) == 0) return Dataset{{}, raw.state_dim, raw.action_dim, std::nullopt};
  return load_dataset(path);
}

void save_augmented(const RunConfig& config, const Dataset& augmented) {
  const fs::path path = fs::path(config.out_dir) / kAugmentedFile;
  if (augmented.empty()) {
    write_text_file_atomic(path, "");
  } else {
    save_dataset(augmented, path);
  }
}

json stitch_stats_json(const RunConfig& config, const AugmentationStats& stats, double threshold) {
  json hist = json::object();
  for (const auto& [delta, count] : stats.delta_histogram) hist[std::to_string(delta)] = count;
  json quantiles = json::object();
  if (!stats.max_errors.empty()) {
    for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      std::ostringstream key;
      key << "q" << std::setw(2) << std::setfill('0') << static_cast<int>(q * 100 + 0.5);
      quantiles[key.str()] = nearest_rank_quantile(stats.max_errors, q);
    }
  }
  json j = run_header(config);
  j["delta_threshold"] = threshold;
  j["attempts"] = stats.attempts;
  j["accepted"] = stats.accepted;
  j["acceptance_rate"] = stats.acceptance_rate;
  j["delta_histogram"] = hist;
  j["max_error_quantiles"] = quantiles;
  j["accepted_attempts"] = stats.accepted_attempts;
  j["config"] = json::parse(config_to_json(config));
  return j;
}

json arm_json(const ArmResult& arm) {
  return json{{"label", arm.label},
              {"success", arm.success},
              {"returns", arm.returns},
              {"success_mean", arm.success_mean},
              {"success_std", arm.success_std},
              {"return_mean", arm.return_mean},
              {"return_std", arm.return_std}};
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

// The policy learner needs augmented transitions only when the ratio samples them.
bool arm_feasible(const Ratio& ratio, const Dataset& augmented) {
  return ratio.augmented_parts == 0 || !augmented.empty();
}

}  // namespace

void cmd_gen_data(const RunConfig& config, std::ostream& out) {
  prepare_output(config);
  const Dataset ds = generate_dataset(config);
  const fs::path path = config.dataset_path();
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  save_dataset(ds, path);

  const int n = config.data.n_per_family;
  double a_max = 0.0;
  double b_min = 1e300;
  for (int i = 0; i < 2 * n; ++i) {
    const double g = compute_returns(ds.trajectories[static_cast<std::size_t>(i)], config.eval.gamma).total;
    if (i < n) a_max = std::max(a_max, g);
    else b_min = std::min(b_min, g);
  }
  out << "wrote " << path.string() << ": " << ds.size() << " trajectories, " << ds.transition_count()
      << " transitions\n"
      << "family A: " << n << " trajectories, max return " << fmt(a_max) << "\n"
      << "family B: " << n << " trajectories, min return " << fmt(b_min) << "\n"
      << "min cross-family distance " << fmt(min_cross_family_distance(ds, n)) << "\n";
}

void cmd_train(const RunConfig& config, std::ostream& out) {
  const fs::path dir = prepare_output(config);
  NormStats norm;
  const Dataset raw = load_raw(config, norm);
  const TrainedModels m = train_models(config, raw, norm);

  const double ds = raw.state_dim;
  const double da = raw.action_dim;
  nn::save_checkpoint({"denoiser", m.denoiser.model.network,
                       {{"horizon", static_cast<double>(m.denoiser.model.horizon)},
                        {"state_dim", ds},
                        {"diffusion_steps", static_cast<double>(m.schedule.steps())},
                        {"cosine_offset", m.schedule.offset()}}},
                      dir / kDenoiserFile);
  nn::save_checkpoint({"inverse_dynamics", m.aux.inverse.network, {{"state_dim", ds}, {"action_dim", da}}},
                      dir / kInverseFile);
  nn::save_checkpoint({"reward", m.aux.reward.network, {{"state_dim", ds}, {"action_dim", da}}}, dir / kRewardFile);
  nn::save_checkpoint({"forward_dynamics", m.aux.forward.network, {{"state_dim", ds}, {"action_dim", da}}},
                      dir / kForwardFile);

  const auto& losses = m.denoiser.step_losses;
  const int interval = config.diffusion.log_interval;
  const std::vector<double> smooth = smooth_curve(losses, 100);
  std::ostringstream den_csv;
  den_csv << std::setprecision(17) << "step,loss,smoothed\n";
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    sum += losses[i];
    if (++count == interval || i + 1 == losses.size()) {
      den_csv << i + 1 << ',' << sum / count << ',' << smooth[i] << '\n';
      sum = 0.0;
      count = 0;
    }
  }
  write_text_file_atomic(dir / kDenoiserLossFile, den_csv.str());

  const auto& rep = m.aux_report;
  std::ostringstream aux_csv;
  aux_csv << std::setprecision(17) << "step,inverse,reward,forward\n";
  for (std::size_t i = 0; i < rep.inverse_curve.size(); ++i) {
    const long step = std::min<long>(static_cast<long>(i + 1) * config.aux.log_interval, config.aux.train_steps);
    aux_csv << step << ',' << rep.inverse_curve[i] << ',' << rep.reward_curve[i] << ',' << rep.forward_curve[i]
            << '\n';
  }
  write_text_file_atomic(dir / kAuxLossFile, aux_csv.str());

  json summary = run_header(config);
  summary["denoiser"] = {{"windows", m.denoiser.windows_available},
                         {"trajectories_skipped", m.denoiser.trajectories_skipped},
                         {"smoothed_loss_first", smooth.empty() ? 0.0 : smooth[std::min<std::size_t>(99, smooth.size() - 1)]},
                         {"smoothed_loss_last", smooth.empty() ? 0.0 : smooth.back()}};
  summary["aux"] = {{"train_transitions", rep.train_transitions},
                    {"holdout_transitions", rep.holdout_transitions},
                    {"inverse_holdout_mse", rep.inverse_holdout_mse},
                    {"reward_holdout_mse", rep.reward_holdout_mse},
                    {"forward_holdout_mse", rep.forward_holdout_mse}};
  write_json(dir / kTrainSummaryFile, summary);

  out << "denoiser: " << losses.size() << " steps over " << m.denoiser.windows_available
      << " windows, smoothed loss " << fmt(summary["denoiser"]["smoothed_loss_first"].get<double>()) << " -> "
      << fmt(summary["denoiser"]["smoothed_loss_last"].get<double>()) << "\n"
      << "aux holdout mse: inverse " << rep.inverse_holdout_mse << ", reward " << rep.reward_holdout_mse
      << ", forward " << rep.forward_holdout_mse << "\n";
}

void cmd_stitch(const RunConfig& config, std::ostream& out) {
  const fs::path dir = prepare_output(config);
  NormStats norm;
  const Dataset raw = load_raw(config, norm);
  const LoadedModels m = load_models(config);
  const auto candidates = stitch_candidates(config, raw, norm, m.denoiser, m.schedule, m.aux);
  const AugmentationResult result = select_qualified(candidates, config.stitch.delta, raw);
  if (result.stats.accepted == 0) warn("stitching accepted no trajectories; d_aug is empty");
  save_augmented(config, result.augmented);
  write_json(dir / kStitchStatsFile, stitch_stats_json(config, result.stats, config.stitch.delta));
  out << "stitch: " << result.stats.accepted << "/" << result.stats.attempts << " accepted (rate "
      << fmt(result.stats.acceptance_rate) << ") at delta " << config.stitch.delta << "\n";
}

void cmd_eval(const RunConfig& config, std::ostream& out) {
  const fs::path dir = prepare_output(config);
  NormStats norm;
  const Dataset raw = load_raw(config, norm);
  const Dataset augmented = load_augmented(config, raw);
  if (!arm_feasible(config.eval.ratio, augmented)) {
    throw TrainingError("augmented dataset is empty; ratio " + config.eval.ratio.label() + " cannot be trained");
  }
  const ArmResult raw_arm = evaluate_arm(config, raw, augmented, norm, Ratio{1, 0}, "raw");
  const ArmResult aug_arm = evaluate_arm(config, raw, augmented, norm, config.eval.ratio, "augmented");
  const ReturnImprovement improvement = return_improvement_report(raw, augmented, config.eval.gamma);

  json report = run_header(config);
  report["ratio"] = config.eval.ratio.label();
  report["seeds"] = config.eval.seeds;
  report["episodes"] = config.eval.episodes;
  report["gamma"] = config.eval.gamma;
  report["augmented_trajectories"] = augmented.size();
  report["arms"] = json::array({arm_json(raw_arm), arm_json(aug_arm)});
  report["return_improvement"] = {
      {"states", improvement.states},
      {"improved", improvement.improved},
      {"fraction", improvement.fraction_improved ? json(*improvement.fraction_improved) : json(nullptr)}};
  write_json(dir / kEvalReportFile, report);
  write_text_file_atomic(dir / kFigure4File, return_improvement_csv(improvement));

  for (const ArmResult* arm : {&raw_arm, &aug_arm}) {
    out << arm->label << ": success " << fmt(arm->success_mean) << " +- " << fmt(arm->success_std) << ", return "
        << fmt(arm->return_mean) << " +- " << fmt(arm->return_std) << "\n";
  }
  out << "return improvement: "
      << (improvement.fraction_improved ? fmt(*improvement.fraction_improved) : std::string("no data")) << " of "
      << improvement.states << " prefix states\n";
}

void cmd_sweep(const RunConfig& config, SweepParam param, std::ostream& out) {
  const fs::path dir = prepare_output(config);
  NormStats norm;
  const Dataset raw = load_raw(config, norm);
  json rows = json::array();
  std::ostringstream csv;
  csv << std::setprecision(17);
  std::string name;

  auto arm_row = [&](json row, const ArmResult* arm) {
    if (arm) {
      row.update(arm_json(*arm));
    } else {
      row["success_mean"] = nullptr;
      row["error"] = "no augmented trajectories";
    }
    return row;
  };
  auto csv_tail = [&](const ArmResult* arm) {
    if (arm) {
      csv << ',' << arm->success_mean << ',' << arm->success_std << ',' << arm->return_mean << ','
          << arm->return_std << '\n';
    } else {
      csv << ",,,,\n";
    }
  };

  if (param == SweepParam::kDelta) {
    name = "delta";
    const LoadedModels m = load_models(config);
    const auto candidates = stitch_candidates(config, raw, norm, m.denoiser, m.schedule, m.aux);
    csv << "delta,accepted,attempts,success_mean,success_std,return_mean,return_std\n";
    for (double delta : config.sweep.delta_grid) {
      const AugmentationResult r = select_qualified(candidates, delta, raw);
      std::optional<ArmResult> arm;
      if (arm_feasible(config.eval.ratio, r.augmented)) {
        std::ostringstream label;
        label << "delta=" << delta;
        arm = evaluate_arm(config, raw, r.augmented, norm, config.eval.ratio, label.str());
      }
      rows.push_back(arm_row({{"delta", delta}, {"accepted", r.stats.accepted}, {"attempts", r.stats.attempts}},
                             arm ? &*arm : nullptr));
      csv << delta << ',' << r.stats.accepted << ',' << r.stats.attempts;
      csv_tail(arm ? &*arm : nullptr);
      out << "delta " << delta << ": accepted " << r.stats.accepted << "/" << r.stats.attempts << ", success "
          << (arm ? fmt(arm->success_mean) : std::string("n/a")) << "\n";
    }
  } else {
    name = "ratio";
    const Dataset augmented = load_augmented(config, raw);
    csv << "ratio,success_mean,success_std,return_mean,return_std\n";
    for (const Ratio& ratio : config.sweep.ratio_grid) {
      std::optional<ArmResult> arm;
      if (arm_feasible(ratio, augmented)) arm = evaluate_arm(config, raw, augmented, norm, ratio, ratio.label());
      rows.push_back(arm_row({{"ratio", ratio.label()}}, arm ? &*arm : nullptr));
      csv << ratio.label();
      csv_tail(arm ? &*arm : nullptr);
      out << "ratio " << ratio.label() << ": success "
          << (arm ? fmt(arm->success_mean) + " +- " + fmt(arm->success_std) : std::string("n/a")) << "\n";
    }
  }
  json table = run_header(config);
  table["parameter"] = name;
  table["rows"] = rows;
  write_json(dir / ("sweep_" + name + ".json"), table);
  write_text_file_atomic(dir / ("sweep_" + name + ".csv"), csv.str());
}

void cmd_run_all(const RunConfig& config, std::ostream& out) {
  cmd_gen_data(config, out);
  cmd_train(config, out);
  cmd_stitch(config, out);
  cmd_eval(config, out);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trajectory stitching augmentation for offline RL datasets", "trajstitch"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::string sweep_param;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
    cmd->add_option("--seed", seed, "root seed");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--set", overrides, "override a config field, key=value with dotted keys");
  };
  const char* names[] = {"gen-data", "train", "stitch", "eval", "sweep", "run-all"};
  const char* help[] = {"generate the scenario dataset", "train the denoiser and auxiliary models",
                        "stitch trajectories into d_aug", "train and evaluate percentile BC on raw and mixed data",
                        "repeat stitch/eval over the delta or ratio grid", "gen-data, train, stitch and eval"};
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < 6; ++i) {
    subs.push_back(app.add_subcommand(names[i], help[i]));
    add_common(subs.back());
  }
  subs[4]->add_option("--param", sweep_param, "delta or ratio")->required()->check(CLI::IsMember({"delta", "ratio"}));

  std::vector<const char*> argv{"trajstitch"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& o : overrides) apply_override(config, o);
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.out_dir = out_dir;
    config.validate();
    if (subs[0]->parsed()) cmd_gen_data(config, out);
    else if (subs[1]->parsed()) cmd_train(config, out);
    else if (subs[2]->parsed()) cmd_stitch(config, out);
    else if (subs[3]->parsed()) cmd_eval(config, out);
    else if (subs[4]->parsed()) cmd_sweep(config, sweep_param == "delta" ? SweepParam::kDelta : SweepParam::kRatio, out);
    else cmd_run_all(config, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace trajstitch::app
