#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "trajstitch/diagnostics.hpp"
#include "trajstitch/errors.hpp"
#include "trajstitch/io_util.hpp"
#include "trajstitch/normalizer.hpp"
#include "trajstitch/partition.hpp"
#include "trajstitch/returns.hpp"
#include "trajstitch/trajectory.hpp"

using namespace trajstitch;
namespace fs = std::filesystem;

namespace {

Trajectory random_trajectory(int length, int ds, int da, Rng& rng) {
  Trajectory t;
  t.states.resize(length, ds);
  t.actions.resize(length, da);
  t.rewards.resize(length);
  for (Eigen::Index i = 0; i < t.states.size(); ++i) t.states.data()[i] = standard_normal(rng) * 1e3;
  for (Eigen::Index i = 0; i < t.actions.size(); ++i) t.actions.data()[i] = standard_normal(rng) / 7.0;
  for (Eigen::Index i = 0; i < t.rewards.size(); ++i) t.rewards(i) = uniform_real(rng, -1.0, 1.0);
  return t;
}

Trajectory with_rewards(std::vector<double> rewards) {
  Trajectory t;
  const auto n = static_cast<Eigen::Index>(rewards.size());
  t.states = Matrix::Zero(n, 1);
  t.actions = Matrix::Zero(n, 1);
  t.rewards = Eigen::Map<Vector>(rewards.data(), n);
  for (Eigen::Index i = 0; i < n; ++i) t.states(i, 0) = static_cast<double>(i);
  return t;
}

Dataset returns_dataset(const std::vector<double>& totals) {
  Dataset ds;
  ds.state_dim = 1;
  ds.action_dim = 1;
  for (double g : totals) ds.trajectories.push_back(with_rewards({0.0, g}));
  return ds;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("jsonl parse of two trajectories") {
  const std::string text =
      "{\"states\":[[0,0],[1,0],[2,0],[3,0],[4,0]],\"actions\":[[1],[1],[1],[1],[0]],\"rewards\":[0,0,0,0,1]}\n"
      "{\"states\":[[0,1],[0,2],[0,3],[0,4],[0,5],[0,6],[0,7]],\"actions\":[[1],[1],[1],[1],[1],[1],[1]],"
      "\"rewards\":[0,0,0,0,0,0,0],\"source\":\"augmented\"}\n";
  const Dataset ds = dataset_from_jsonl(text);
  CHECK(ds.size() == 2);
  CHECK(ds.state_dim == 2);
  CHECK(ds.action_dim == 1);
  CHECK(ds.trajectories[0].length() == 5);
  CHECK(ds.trajectories[1].length() == 7);
  CHECK(ds.trajectories[0].source == SourceTag::kOriginal);
  CHECK(ds.trajectories[1].source == SourceTag::kAugmented);
}

TEST_CASE("empty file is an empty dataset error") {
  CHECK_THROWS_WITH_AS(dataset_from_jsonl(""), doctest::Contains("empty dataset"), SchemaError);
  CHECK_THROWS_WITH_AS(dataset_from_jsonl("\n\n"), doctest::Contains("empty dataset"), SchemaError);
}

TEST_CASE("malformed record names its line") {
  const std::string good = "{\"states\":[[0],[1]],\"actions\":[[0],[0]],\"rewards\":[0,0]}\n";
  const std::string bad = "{\"states\":[[0],[1],[2]],\"actions\":[[0],[0]],\"rewards\":[0,0,0]}\n";
  try {
    dataset_from_jsonl(good + good + bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  try {
    dataset_from_jsonl(good + "{not json\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("dimension mismatch across trajectories is a schema error") {
  const std::string a = "{\"states\":[[0],[1]],\"actions\":[[0],[0]],\"rewards\":[0,0]}\n";
  const std::string b = "{\"states\":[[0,0],[1,1]],\"actions\":[[0],[0]],\"rewards\":[0,0]}\n";
  CHECK_THROWS_AS(dataset_from_jsonl(a + b), SchemaError);
}

TEST_CASE("non-finite and too-short trajectories are rejected") {
  Trajectory t = with_rewards({0.0, 1.0});
  t.states(1, 0) = std::nan("");
  CHECK_THROWS_AS(t.validate(), SchemaError);
  CHECK_THROWS_AS(with_rewards({1.0}).validate(), SchemaError);
}

TEST_CASE("save and load is value-exact") {
  TempDir dir("trajstitch_data_roundtrip");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    Dataset ds;
    ds.state_dim = uniform_int(rng, 1, 4);
    ds.action_dim = uniform_int(rng, 1, 3);
    const int n = uniform_int(rng, 1, 5);
    for (int i = 0; i < n; ++i) {
      ds.trajectories.push_back(random_trajectory(uniform_int(rng, 2, 12), ds.state_dim, ds.action_dim, rng));
    }
    ds.trajectories.back().source = SourceTag::kAugmented;
    ds.trajectories.back().provenance = StitchProvenance{0, 3, 1, 2, 4};
    ds.norm_stats = fit_normalizer(ds);
    save_dataset(ds, dir.path / "d.jsonl");
    CHECK(fs::exists(dir.path / "d.stats.json"));
    const Dataset back = load_dataset(dir.path / "d.jsonl");
    REQUIRE(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) CHECK(back.trajectories[i] == ds.trajectories[i]);
    CHECK(back.trajectories.back().source == SourceTag::kAugmented);
    CHECK(back.trajectories.back().provenance == ds.trajectories.back().provenance);
    REQUIRE(back.norm_stats.has_value());
    CHECK(*back.norm_stats == *ds.norm_stats);
  }
}

TEST_CASE("save into a missing directory is an io error") {
  Rng rng(1);
  Dataset ds{{random_trajectory(3, 1, 1, rng)}, 1, 1, std::nullopt};
  CHECK_THROWS_AS(save_dataset(ds, fs::temp_directory_path() / "no_such_dir_ts" / "d.jsonl"), IoError);
  CHECK_THROWS_AS(load_dataset(fs::temp_directory_path() / "no_such_dir_ts" / "d.jsonl"), ConfigError);
}

TEST_CASE("sidecar path") {
  CHECK(stats_sidecar_path("run/dataset.jsonl") == fs::path("run/dataset.stats.json"));
}

TEST_CASE("atomic write leaves no temp file behind") {
  TempDir dir("trajstitch_atomic");
  write_text_file_atomic(dir.path / "a.txt", "hello");
  write_text_file_atomic(dir.path / "a.txt", "bye");
  CHECK(read_text_file(dir.path / "a.txt") == "bye");
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path)) ++files;
  CHECK(files == 1);
}

TEST_CASE("return examples") {
  CHECK(compute_returns(with_rewards({1, 1}), 0.99).total == doctest::Approx(1.99));
  CHECK(compute_returns(with_rewards({0, 0, 0}), 0.9).total == 0.0);
  CHECK(compute_returns(with_rewards({0, 0, 1}), 0.9).total == doctest::Approx(0.81));
  CHECK_THROWS_AS(compute_returns(with_rewards({0, 1}), 0.0), ConfigError);
  CHECK_THROWS_AS(compute_returns(with_rewards({0, 1}), 1.5), ConfigError);
}

TEST_CASE("return-to-go recursion holds exactly") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const Trajectory t = random_trajectory(uniform_int(rng, 2, 30), 1, 1, rng);
    const double gamma = uniform_real(rng, 0.01, 1.0);
    const ReturnIndex r = compute_returns(t, gamma);
    const int n = t.length();
    CHECK(r.return_to_go(n - 1) == t.rewards(n - 1));
    for (int i = 0; i + 1 < n; ++i) CHECK(r.return_to_go(i) == t.rewards(i) + gamma * r.return_to_go(i + 1));
    CHECK(r.total == r.return_to_go(0));
  }
}

TEST_CASE("normalizer two-point example") {
  Dataset ds;
  ds.state_dim = 2;
  ds.action_dim = 1;
  Trajectory t;
  t.states = (Matrix(2, 2) << 0, 0, 2, 2).finished();
  t.actions = Matrix::Zero(2, 1);
  t.rewards = Vector::Zero(2);
  ds.trajectories.push_back(t);
  const NormStats s = fit_normalizer(ds);
  CHECK(s.mean(0) == 1.0);
  CHECK(s.mean(1) == 1.0);
  CHECK(s.std(0) == 1.0);
  CHECK(s.std(1) == 1.0);
}

TEST_CASE("constant dimension is floored with a warning") {
  Dataset ds;
  ds.state_dim = 2;
  ds.action_dim = 1;
  Trajectory t;
  t.states = (Matrix(3, 2) << 5, 0, 5, 1, 5, 2).finished();
  t.actions = Matrix::Zero(3, 1);
  t.rewards = Vector::Zero(3);
  ds.trajectories.push_back(t);
  WarningCapture warnings;
  const NormStats s = fit_normalizer(ds);
  CHECK(s.mean(0) == 5.0);
  CHECK(s.std(0) == kStdFloor);
  CHECK(warnings.messages().size() == 1);
  const RowVector z = s.normalize(RowVector(t.states.row(0)));
  CHECK(std::isfinite(z(0)));
  CHECK(z(0) == 0.0);
}

TEST_CASE("normalize round-trips and standardizes the fitting data") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    Dataset ds;
    ds.state_dim = 3;
    ds.action_dim = 1;
    for (int i = 0; i < 4; ++i) ds.trajectories.push_back(random_trajectory(uniform_int(rng, 2, 40), 3, 1, rng));
    const NormStats s = fit_normalizer(ds);
    RowVector v(3);
    v << standard_normal(rng), 1e3 * standard_normal(rng), -7.0;
    CHECK((s.denormalize(s.normalize(v)) - v).cwiseAbs().maxCoeff() < 1e-9);

    const Dataset n = normalized_copy(ds, s);
    Eigen::Index rows = 0;
    RowVector sum = RowVector::Zero(3);
    for (const auto& t : n.trajectories) {
      sum += t.states.colwise().sum();
      rows += t.length();
    }
    const RowVector mean = sum / static_cast<double>(rows);
    RowVector sq = RowVector::Zero(3);
    for (const auto& t : n.trajectories) sq += (t.states.rowwise() - mean).array().square().colwise().sum().matrix();
    const RowVector stdv = (sq / static_cast<double>(rows)).cwiseSqrt();
    CHECK(mean.cwiseAbs().maxCoeff() < 1e-6);
    CHECK((stdv.array() - 1.0).abs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("norm stats json round-trip") {
  NormStats s{(RowVector(2) << 0.1, -3.3).finished(), (RowVector(2) << 1.0 / 3.0, 7.0).finished()};
  CHECK(norm_stats_from_json(norm_stats_to_json(s)) == s);
}

TEST_CASE("nearest-rank pools on four returns") {
  const ReturnPools p = partition_by_return(returns_dataset({0, 1, 2, 3}), 1.0, 0.5, 0.75);
  CHECK(p.low == std::vector<int>{0, 1});
  CHECK(p.high == std::vector<int>{3});
}

TEST_CASE("equal returns put everything in both pools with a warning") {
  WarningCapture warnings;
  const ReturnPools p = partition_by_return(returns_dataset({2, 2, 2}), 1.0, 0.5, 0.8);
  CHECK(p.low == std::vector<int>{0, 1, 2});
  CHECK(p.high == std::vector<int>{0, 1, 2});
  CHECK(!warnings.messages().empty());
}

TEST_CASE("single trajectory is in both pools") {
  const ReturnPools p = partition_by_return(returns_dataset({4}), 1.0, 0.5, 0.5);
  CHECK(p.low == std::vector<int>{0});
  CHECK(p.high == std::vector<int>{0});
}

TEST_CASE("pool quantiles are validated") {
  CHECK_THROWS_AS(partition_by_return(returns_dataset({0, 1}), 1.0, 0.8, 0.5), ConfigError);
  CHECK_THROWS_AS(partition_by_return(returns_dataset({0, 1}), 1.0, 0.0, 0.5), ConfigError);
  CHECK_THROWS_AS(partition_by_return(returns_dataset({0, 1}), 1.0, 0.5, 1.0), ConfigError);
}

TEST_CASE("high pool dominates low pool for distinct returns") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    std::vector<double> totals;
    const int n = uniform_int(rng, 1, 40);
    for (int i = 0; i < n; ++i) totals.push_back(uniform_real(rng, -5.0, 5.0));
    const double lo = uniform_real(rng, 0.05, 0.9);
    const double hi = uniform_real(rng, lo + 1e-3, 0.99);
    const ReturnPools p = partition_by_return(returns_dataset(totals), 1.0, lo, hi);
    REQUIRE(!p.low.empty());
    REQUIRE(!p.high.empty());
    double low_max = -1e9;
    double high_min = 1e9;
    for (int i : p.low) low_max = std::max(low_max, totals[static_cast<std::size_t>(i)]);
    for (int i : p.high) high_min = std::min(high_min, totals[static_cast<std::size_t>(i)]);
    if (n > 1 && p.low.size() + p.high.size() <= static_cast<std::size_t>(n)) CHECK(high_min >= low_max);
  }
}

TEST_CASE("cut examples") {
  Rng rng(3);
  const Trajectory t10 = random_trajectory(10, 2, 1, rng);
  // Cut at the sixth state.
  const CutSegment c = cut_segment(t10, 5, 3, CutMode::kPrefix);
  CHECK(c.segment.length() == 6);
  CHECK(c.cut_state == RowVector(t10.states.row(5)));
  CHECK(c.segment.states == t10.states.topRows(6));

  const CutSegment s = cut_segment(t10, 5, 3, CutMode::kSuffix);
  CHECK(s.segment.length() == 5);
  CHECK(s.cut_state == RowVector(t10.states.row(5)));

  const Trajectory t5 = random_trajectory(5, 2, 1, rng);
  for (int i = 0; i < 20; ++i) {
    // Only the third state is a legal cut for T=5, min_keep=3.
    CHECK(sample_cut_segment(t5, rng, 3, CutMode::kPrefix).segment.length() == 3);
  }
  const Trajectory t4 = random_trajectory(4, 2, 1, rng);
  CHECK_THROWS_AS(sample_cut_segment(t4, rng, 3, CutMode::kPrefix), ConfigError);
  CHECK_THROWS_AS(cut_segment(t10, 1, 3, CutMode::kPrefix), ConfigError);
}

TEST_CASE("sampled cuts keep at least min_keep tuples") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const int min_keep = uniform_int(rng, 1, 6);
    const Trajectory t = random_trajectory(uniform_int(rng, std::max(2, 2 * min_keep - 1), 30), 1, 1, rng);
    const CutMode mode = seed % 2 ? CutMode::kPrefix : CutMode::kSuffix;
    const CutSegment c = sample_cut_segment(t, rng, min_keep, mode);
    CHECK(c.segment.length() >= min_keep);
    if (mode == CutMode::kPrefix) {
      CHECK(c.cut_state == RowVector(c.segment.states.bottomRows(1)));
    } else {
      CHECK(c.cut_state == RowVector(c.segment.states.topRows(1)));
    }
  }
}
