#include "trajstitch/normalizer.hpp"

#include <cmath>

#include "json.hpp"
#include "trajstitch/diagnostics.hpp"
#include "trajstitch/errors.hpp"
#include "trajstitch/trajectory.hpp"

namespace trajstitch {

RowVector NormStats::normalize(const RowVector& v) const {
  if (v.size() != mean.size()) throw ShapeError("normalize: dimension mismatch");
  return (v - mean).cwiseQuotient(std);
}

RowVector NormStats::denormalize(const RowVector& v) const {
  if (v.size() != mean.size()) throw ShapeError("denormalize: dimension mismatch");
  return v.cwiseProduct(std) + mean;
}

Matrix NormStats::normalize(const Matrix& m) const {
  if (m.cols() != mean.size()) throw ShapeError("normalize: dimension mismatch");
  Matrix out = m.rowwise() - mean;
  out.array().rowwise() /= std.array();
  return out;
}

Matrix NormStats::denormalize(const Matrix& m) const {
  if (m.cols() != mean.size()) throw ShapeError("denormalize: dimension mismatch");
  Matrix out = m;
  out.array().rowwise() *= std.array();
  out.rowwise() += mean;
  return out;
}

NormStats fit_normalizer(const Dataset& dataset, double std_floor) {
  if (dataset.empty()) throw ConfigError("fit_normalizer: empty dataset");
  if (std_floor <= 0.0) throw ConfigError("fit_normalizer: std floor must be positive");
  const int d = dataset.state_dim;
  RowVector sum = RowVector::Zero(d);
  double count = 0.0;
  for (const auto& t : dataset.trajectories) {
    sum += t.states.colwise().sum();
    count += static_cast<double>(t.length());
  }
  NormStats stats;
  stats.mean = sum / count;
  RowVector sq = RowVector::Zero(d);
  for (const auto& t : dataset.trajectories) {
    sq += (t.states.rowwise() - stats.mean).array().square().matrix().colwise().sum();
  }
  stats.std = (sq / count).cwiseSqrt();
  for (int i = 0; i < d; ++i) {
    if (!(stats.std(i) >= std_floor)) {
      warn("state dimension " + std::to_string(i) + " is (near) constant; std floored to " +
           std::to_string(std_floor));
      stats.std(i) = std_floor;
    }
  }
  return stats;
}

std::string norm_stats_to_json(const NormStats& stats) {
  nlohmann::json j;
  j["mean"] = std::vector<double>(stats.mean.data(), stats.mean.data() + stats.mean.size());
  j["std"] = std::vector<double>(stats.std.data(), stats.std.data() + stats.std.size());
  return j.dump() + "\n";
}

NormStats norm_stats_from_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    auto mean = j.at("mean").get<std::vector<double>>();
    auto std = j.at("std").get<std::vector<double>>();
    if (mean.size() != std.size() || mean.empty()) throw SchemaError("stats: mean/std size mismatch");
    NormStats s;
    s.mean = Eigen::Map<RowVector>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    s.std = Eigen::Map<RowVector>(std.data(), static_cast<Eigen::Index>(std.size()));
    if ((s.std.array() <= 0.0).any()) throw SchemaError("stats: std must be positive");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed stats file: ") + e.what());
  }
}

}  // namespace trajstitch
