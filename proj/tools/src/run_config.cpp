#include "trajstitch/app/run_config.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"

#include "trajstitch/errors.hpp"
#include "trajstitch/io_util.hpp"
#include "trajstitch/rng.hpp"

namespace trajstitch::app {

using nlohmann::json;

std::string Ratio::label() const { return std::to_string(original_parts) + ":" + std::to_string(augmented_parts); }

Ratio parse_ratio(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("ratio must look like o:a, got '" + text + "'");
  Ratio r;
  try {
    std::size_t used = 0;
    const std::string lhs = text.substr(0, colon);
    const std::string rhs = text.substr(colon + 1);
    r.original_parts = std::stoi(lhs, &used);
    if (used != lhs.size()) throw std::invalid_argument(lhs);
    r.augmented_parts = std::stoi(rhs, &used);
    if (used != rhs.size()) throw std::invalid_argument(rhs);
  } catch (const std::logic_error&) {
    throw ConfigError("ratio must look like o:a, got '" + text + "'");
  }
  if (r.original_parts < 0 || r.augmented_parts < 0 || r.original_parts + r.augmented_parts == 0) {
    throw ConfigError("ratio parts must be non-negative and not both zero: '" + text + "'");
  }
  return r;
}

namespace {

void require(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) throw ConfigError(field + " " + rule);
}

void require_widths(const std::vector<int>& widths, const std::string& field) {
  require(!widths.empty(), field, "must list at least one hidden width");
  for (int w : widths) require(w >= 1, field, "widths must be >= 1");
}

// Pulls typed fields out of one JSON object and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw SchemaError(where() + " must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = object_.find(key);
    if (it == object_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw SchemaError(where() + key + " has the wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = object_.begin(); it != object_.end(); ++it) {
      if (!seen_.count(it.key())) throw SchemaError("unknown config key " + where() + it.key());
    }
  }

  std::string where() const { return path_.empty() ? "" : path_ + "."; }

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

json to_json(const RunConfig& c) {
  std::vector<std::string> ratios;
  for (const auto& r : c.sweep.ratio_grid) ratios.push_back(r.label());
  return json{
      {"seed", c.seed},
      {"out_dir", c.out_dir},
      {"data",
       {{"scenario", c.data.scenario},
        {"dataset_path", c.data.dataset_path},
        {"n_per_family", c.data.n_per_family},
        {"goal_radius", c.data.goal_radius},
        {"max_step", c.data.max_step},
        {"episode_cap", c.data.episode_cap},
        {"start_jitter", c.data.start_jitter},
        {"min_family_gap", c.data.min_family_gap}}},
      {"diffusion",
       {{"horizon", c.diffusion.horizon},
        {"diffusion_steps", c.diffusion.diffusion_steps},
        {"cosine_offset", c.diffusion.cosine_offset},
        {"hidden", c.diffusion.hidden},
        {"train_steps", c.diffusion.train_steps},
        {"batch_size", c.diffusion.batch_size},
        {"learning_rate", c.diffusion.learning_rate},
        {"log_interval", c.diffusion.log_interval}}},
      {"aux",
       {{"inverse_hidden", c.aux.inverse_hidden},
        {"dynamics_hidden", c.aux.dynamics_hidden},
        {"train_steps", c.aux.train_steps},
        {"batch_size", c.aux.batch_size},
        {"learning_rate", c.aux.learning_rate},
        {"log_interval", c.aux.log_interval},
        {"validation_fraction", c.aux.validation_fraction}}},
      {"stitch",
       {{"delta", c.stitch.delta},
        {"iterations", c.stitch.iterations},
        {"min_keep", c.stitch.min_keep},
        {"low_quantile", c.stitch.low_quantile},
        {"high_quantile", c.stitch.high_quantile},
        {"rank_gamma", c.stitch.rank_gamma},
        {"batch_size", c.stitch.batch_size}}},
      {"eval",
       {{"ratio", c.eval.ratio.label()},
        {"batch_size", c.eval.batch_size},
        {"percentile", c.eval.percentile},
        {"return_tolerance", c.eval.return_tolerance},
        {"hidden", c.eval.hidden},
        {"train_steps", c.eval.train_steps},
        {"learning_rate", c.eval.learning_rate},
        {"seeds", c.eval.seeds},
        {"episodes", c.eval.episodes},
        {"gamma", c.eval.gamma}}},
      {"sweep", {{"delta_grid", c.sweep.delta_grid}, {"ratio_grid", ratios}}},
  };
}

RunConfig from_json(const json& j) {
  RunConfig c;
  Reader root(j, "");
  root.get("seed", c.seed);
  root.get("out_dir", c.out_dir);
  if (const json* s = root.child("data")) {
    Reader r(*s, "data");
    r.get("scenario", c.data.scenario);
    r.get("dataset_path", c.data.dataset_path);
    r.get("n_per_family", c.data.n_per_family);
    r.get("goal_radius", c.data.goal_radius);
    r.get("max_step", c.data.max_step);
    r.get("episode_cap", c.data.episode_cap);
    r.get("start_jitter", c.data.start_jitter);
    r.get("min_family_gap", c.data.min_family_gap);
    r.finish();
  }
  if (const json* s = root.child("diffusion")) {
    Reader r(*s, "diffusion");
    r.get("horizon", c.diffusion.horizon);
    r.get("diffusion_steps", c.diffusion.diffusion_steps);
    r.get("cosine_offset", c.diffusion.cosine_offset);
    r.get("hidden", c.diffusion.hidden);
    r.get("train_steps", c.diffusion.train_steps);
    r.get("batch_size", c.diffusion.batch_size);
    r.get("learning_rate", c.diffusion.learning_rate);
    r.get("log_interval", c.diffusion.log_interval);
    r.finish();
  }
  if (const json* s = root.child("aux")) {
    Reader r(*s, "aux");
    r.get("inverse_hidden", c.aux.inverse_hidden);
    r.get("dynamics_hidden", c.aux.dynamics_hidden);
    r.get("train_steps", c.aux.train_steps);
    r.get("batch_size", c.aux.batch_size);
    r.get("learning_rate", c.aux.learning_rate);
    r.get("log_interval", c.aux.log_interval);
    r.get("validation_fraction", c.aux.validation_fraction);
    r.finish();
  }
  if (const json* s = root.child("stitch")) {
    Reader r(*s, "stitch");
    r.get("delta", c.stitch.delta);
    r.get("iterations", c.stitch.iterations);
    r.get("min_keep", c.stitch.min_keep);
    r.get("low_quantile", c.stitch.low_quantile);
    r.get("high_quantile", c.stitch.high_quantile);
    r.get("rank_gamma", c.stitch.rank_gamma);
    r.get("batch_size", c.stitch.batch_size);
    r.finish();
  }
  if (const json* s = root.child("eval")) {
    Reader r(*s, "eval");
    std::string ratio = c.eval.ratio.label();
    r.get("ratio", ratio);
    c.eval.ratio = parse_ratio(ratio);
    r.get("batch_size", c.eval.batch_size);
    r.get("percentile", c.eval.percentile);
    r.get("return_tolerance", c.eval.return_tolerance);
    r.get("hidden", c.eval.hidden);
    r.get("train_steps", c.eval.train_steps);
    r.get("learning_rate", c.eval.learning_rate);
    r.get("seeds", c.eval.seeds);
    r.get("episodes", c.eval.episodes);
    r.get("gamma", c.eval.gamma);
    r.finish();
  }
  if (const json* s = root.child("sweep")) {
    Reader r(*s, "sweep");
    r.get("delta_grid", c.sweep.delta_grid);
    if (const json* grid = r.child("ratio_grid")) {
      if (!grid->is_array()) throw SchemaError("sweep.ratio_grid must be an array of \"o:a\" strings");
      c.sweep.ratio_grid.clear();
      for (const auto& item : *grid) {
        if (!item.is_string()) throw SchemaError("sweep.ratio_grid must be an array of \"o:a\" strings");
        c.sweep.ratio_grid.push_back(parse_ratio(item.get<std::string>()));
      }
    }
    r.finish();
  }
  root.finish();
  return c;
}

}  // namespace

void RunConfig::validate() const {
  require(!out_dir.empty(), "out_dir", "must not be empty");
  require(data.scenario == kDisjointFamilies, "data.scenario", "must be '" + std::string(kDisjointFamilies) + "'");
  require(data.n_per_family >= 1, "data.n_per_family", "must be >= 1");
  require(data.goal_radius > 0.0, "data.goal_radius", "must be > 0");
  require(data.max_step > 0.0, "data.max_step", "must be > 0");
  require(data.episode_cap >= 1, "data.episode_cap", "must be >= 1");
  require(data.start_jitter >= 0.0, "data.start_jitter", "must be >= 0");
  require(data.min_family_gap >= 0.0, "data.min_family_gap", "must be >= 0");

  require(diffusion.horizon >= 4, "diffusion.horizon", "must be >= 4");
  require(diffusion.diffusion_steps >= 2, "diffusion.diffusion_steps", "must be >= 2");
  require(diffusion.cosine_offset > 0.0, "diffusion.cosine_offset", "must be > 0");
  require_widths(diffusion.hidden, "diffusion.hidden");
  require(diffusion.train_steps >= 1, "diffusion.train_steps", "must be >= 1");
  require(diffusion.batch_size >= 1, "diffusion.batch_size", "must be >= 1");
  require(diffusion.learning_rate > 0.0, "diffusion.learning_rate", "must be > 0");
  require(diffusion.log_interval >= 1, "diffusion.log_interval", "must be >= 1");

  require_widths(aux.inverse_hidden, "aux.inverse_hidden");
  require_widths(aux.dynamics_hidden, "aux.dynamics_hidden");
  require(aux.train_steps >= 1, "aux.train_steps", "must be >= 1");
  require(aux.batch_size >= 1, "aux.batch_size", "must be >= 1");
  require(aux.learning_rate > 0.0, "aux.learning_rate", "must be > 0");
  require(aux.log_interval >= 1, "aux.log_interval", "must be >= 1");
  require(aux.validation_fraction >= 0.0 && aux.validation_fraction < 1.0, "aux.validation_fraction",
          "must lie in [0, 1)");

  stitch_config().validate();

  require(eval.batch_size >= 1, "eval.batch_size", "must be >= 1");
  require(eval.percentile > 0.0 && eval.percentile <= 1.0, "eval.percentile", "must lie in (0, 1]");
  require(eval.return_tolerance >= 0.0, "eval.return_tolerance", "must be >= 0");
  require_widths(eval.hidden, "eval.hidden");
  require(eval.train_steps >= 1, "eval.train_steps", "must be >= 1");
  require(eval.learning_rate > 0.0, "eval.learning_rate", "must be > 0");
  require(eval.seeds >= 1, "eval.seeds", "must be >= 1");
  require(eval.episodes >= 1, "eval.episodes", "must be >= 1");
  require(eval.gamma > 0.0 && eval.gamma <= 1.0, "eval.gamma", "must lie in (0, 1]");

  require(!sweep.delta_grid.empty(), "sweep.delta_grid", "must not be empty");
  for (double d : sweep.delta_grid) require(d > 0.0, "sweep.delta_grid", "values must be > 0");
  require(!sweep.ratio_grid.empty(), "sweep.ratio_grid", "must not be empty");
}

std::filesystem::path RunConfig::dataset_path() const {
  if (!data.dataset_path.empty()) return data.dataset_path;
  return std::filesystem::path(out_dir) / "dataset.jsonl";
}

PointMazeSpec RunConfig::maze() const {
  PointMazeSpec spec;
  spec.goal_radius = data.goal_radius;
  spec.max_step = data.max_step;
  spec.episode_cap = data.episode_cap;
  spec.start_jitter = data.start_jitter;
  return spec;
}

DisjointFamiliesConfig RunConfig::families() const {
  DisjointFamiliesConfig f;
  f.min_family_gap = data.min_family_gap;
  return f;
}

DenoiserTrainConfig RunConfig::denoiser_config() const {
  DenoiserTrainConfig d;
  d.horizon = diffusion.horizon;
  d.hidden = diffusion.hidden;
  d.steps = diffusion.train_steps;
  d.batch_size = diffusion.batch_size;
  d.adam.learning_rate = diffusion.learning_rate;
  d.log_interval = diffusion.log_interval;
  return d;
}

AuxTrainConfig RunConfig::aux_config() const {
  AuxTrainConfig a;
  a.inverse_hidden = aux.inverse_hidden;
  a.dynamics_hidden = aux.dynamics_hidden;
  a.steps = aux.train_steps;
  a.batch_size = aux.batch_size;
  a.adam.learning_rate = aux.learning_rate;
  a.log_interval = aux.log_interval;
  a.validation_fraction = aux.validation_fraction;
  return a;
}

StitchConfig RunConfig::stitch_config() const {
  StitchConfig s;
  s.horizon = diffusion.horizon;
  s.delta_threshold = stitch.delta;
  s.iterations = stitch.iterations;
  s.min_keep = stitch.min_keep;
  s.low_quantile = stitch.low_quantile;
  s.high_quantile = stitch.high_quantile;
  s.rank_gamma = stitch.rank_gamma;
  s.batch_size = stitch.batch_size;
  return s;
}

BcConfig RunConfig::bc_config() const {
  BcConfig b;
  b.hidden = eval.hidden;
  b.steps = eval.train_steps;
  b.adam.learning_rate = eval.learning_rate;
  b.percentile = eval.percentile;
  b.return_tolerance = eval.return_tolerance;
  return b;
}

MixConfig RunConfig::mix(const Ratio& ratio) const {
  return MixConfig{ratio.original_parts, ratio.augmented_parts, eval.batch_size};
}

std::string config_to_json(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

RunConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  return config_from_json(read_text_file(path));
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json doc = to_json(config);
  json* node = &doc;
  std::stringstream parts(key);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (!node->is_object() || !node->contains(part)) throw ConfigError("unknown config key '" + key + "'");
    node = &(*node)[part];
  }
  // Ratios are strings in the file but "4:1" is not JSON, so keep the raw text.
  if (node->is_string() && !value.is_string()) value = text;
  *node = value;
  config = from_json(doc);
}

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a_64(to_json(config).dump())));
  return buf;
}

}  // namespace trajstitch::app
