#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fd_oracle.hpp"
#include "trajstitch/denoiser.hpp"
#include "trajstitch/errors.hpp"
#include "trajstitch/masked_window.hpp"
#include "trajstitch/sampler.hpp"
#include "trajstitch/schedule.hpp"

using namespace trajstitch;

namespace {

// Closed-form cosine schedule, recomputed here without the clipping chain.
double cosine_alpha_bar(int k, int K, double s) {
  auto f = [&](double t) {
    const double c = std::cos((t / K + s) / (1.0 + s) * std::numbers::pi / 2.0);
    return c * c;
  };
  return f(k) / f(0);
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = standard_normal(rng);
  return m;
}

Trajectory line_trajectory(const RowVector& start, const RowVector& velocity, int length) {
  Trajectory t;
  t.states.resize(length, start.size());
  for (int i = 0; i < length; ++i) t.states.row(i) = start + i * velocity;
  t.actions = Matrix::Zero(length, 1);
  t.rewards = Vector::Zero(length);
  return t;
}

DenoiserModel train_on(const Dataset& ds, const NoiseSchedule& schedule, int horizon, int steps, Rng& rng,
                       std::vector<int> hidden = {128, 128}, int batch = 64, double lr = 2e-3) {
  DenoiserTrainConfig cfg;
  cfg.horizon = horizon;
  cfg.hidden = std::move(hidden);
  cfg.steps = steps;
  cfg.batch_size = batch;
  cfg.adam.learning_rate = lr;
  return train_denoiser(ds, schedule, cfg, rng).model;
}

}  // namespace

TEST_CASE("cosine schedule invariants") {
  for (int K : {2, 5, 10, 20, 100, 1000}) {
    const NoiseSchedule s = build_cosine_schedule(K);
    CHECK(s.steps() == K);
    if (K >= 20) CHECK(s.alpha_bar(1) > 0.99);
    double prev = 1.0;
    for (int k = 1; k <= K; ++k) {
      CHECK(s.alpha(k) > 0.0);
      CHECK(s.alpha(k) < 1.0);
      CHECK(s.alpha_bar(k) > 0.0);
      CHECK(s.alpha_bar(k) < prev);
      CHECK(s.alpha_bar(k) == doctest::Approx((k == 1 ? 1.0 : s.alpha_bar(k - 1)) * s.alpha(k)).epsilon(1e-14));
      prev = s.alpha_bar(k);
    }
  }
}

TEST_CASE("K=100 schedule ends near zero and follows the closed form") {
  const NoiseSchedule s = build_cosine_schedule(100);
  CHECK(s.alpha_bar(100) < 0.01);
  // Clipping only engages at the very end of the schedule.
  for (int k = 1; k <= 90; ++k) {
    CHECK(s.alpha_bar(k) == doctest::Approx(cosine_alpha_bar(k, 100, 0.008)).epsilon(1e-12));
  }
}

TEST_CASE("schedule argument errors") {
  CHECK_THROWS_AS(build_cosine_schedule(1), ConfigError);
  const NoiseSchedule s = build_cosine_schedule(10);
  CHECK_THROWS_AS(s.alpha(0), ConfigError);
  CHECK_THROWS_AS(s.alpha_bar(11), ConfigError);
  CHECK_THROWS_AS(forward_noise(Matrix::Zero(2, 2), 0, Matrix::Zero(2, 2), s), ConfigError);
}

TEST_CASE("forward noise degenerate inputs") {
  const NoiseSchedule s = build_cosine_schedule(100);
  Rng rng(1);
  const Matrix w = random_matrix(4, 2, rng);
  const Matrix e = random_matrix(4, 2, rng);
  for (int k : {1, 50, 100}) {
    const Matrix a = forward_noise(w, k, Matrix::Zero(4, 2), s);
    CHECK((a - std::sqrt(s.alpha_bar(k)) * w).cwiseAbs().maxCoeff() == 0.0);
    const Matrix b = forward_noise(Matrix::Zero(4, 2), k, e, s);
    CHECK((b - std::sqrt(1.0 - s.alpha_bar(k)) * e).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("forward noise moments match the closed form") {
  const NoiseSchedule s = build_cosine_schedule(100);
  Rng rng(2);
  Matrix w(1, 3);
  w << 1.5, -0.5, 0.0;
  const int draws = 100000;
  for (int k : {1, 50, 100}) {
    RowVector sum = RowVector::Zero(3);
    RowVector sq = RowVector::Zero(3);
    for (int i = 0; i < draws; ++i) {
      const Matrix x = forward_noise(w, k, random_matrix(1, 3, rng), s);
      sum += x.row(0);
      sq += x.row(0).array().square().matrix();
    }
    const double var_true = 1.0 - s.alpha_bar(k);
    for (int j = 0; j < 3; ++j) {
      const double mean = sum(j) / draws;
      const double var = sq(j) / draws - mean * mean;
      CHECK(std::abs(mean - std::sqrt(s.alpha_bar(k)) * w(0, j)) <= 3.0 * std::sqrt(var_true / draws));
      CHECK(std::abs(var - var_true) <= 0.02 * var_true);
    }
  }
}

TEST_CASE("training mask from explicit intervals") {
  // Intervals at positions 2..4 and 6..8 counted from one.
  const std::vector<bool> m = training_mask_from_intervals(8, 1, 3, 3);
  CHECK(m == std::vector<bool>{true, false, false, false, true, false, false, false});
  CHECK_THROWS_AS(training_mask_from_intervals(8, 0, 3, 3), ConfigError);
  CHECK_THROWS_AS(training_mask_from_intervals(8, 2, 3, 3), ConfigError);
}

TEST_CASE("training mask law") {
  Rng rng(3);
  for (int trial = 0; trial < 5000; ++trial) {
    const int H = uniform_int(rng, 4, 40);
    const std::vector<bool> m = make_training_mask(H, rng);
    REQUIRE(static_cast<int>(m.size()) == H);
    CHECK(m.front());
    CHECK(!m.back());
    int runs = 0;
    for (int i = 0; i < H; ++i) {
      if (!m[static_cast<std::size_t>(i)] && (i == 0 || m[static_cast<std::size_t>(i - 1)])) ++runs;
    }
    CHECK(runs == 2);
  }
  CHECK_THROWS_AS(make_training_mask(3, rng), ConfigError);
}

TEST_CASE("training mask covers every interior position both ways") {
  Rng rng(4);
  const int H = 20;
  std::vector<int> masked(H, 0), observed(H, 0);
  for (int trial = 0; trial < 10000; ++trial) {
    const auto m = make_training_mask(H, rng);
    for (int i = 0; i < H; ++i) (m[static_cast<std::size_t>(i)] ? observed : masked)[static_cast<std::size_t>(i)]++;
  }
  for (int i = 1; i + 1 < H; ++i) {
    CHECK(masked[static_cast<std::size_t>(i)] > 0);
    CHECK(observed[static_cast<std::size_t>(i)] > 0);
  }
}

TEST_CASE("masked window validation") {
  MaskedWindow w{Matrix::Zero(4, 2), {false, false, false, false}};
  CHECK_THROWS_AS(w.validate(), SchemaError);
  w.observed = {true, false, false};
  CHECK_THROWS_AS(w.validate(), SchemaError);
  w.observed = {true, false, false, false};
  w.values(0, 0) = std::nan("");
  CHECK_THROWS_AS(w.validate(), SchemaError);
  w.values(0, 0) = 0.0;
  w.values(2, 0) = std::nan("");  // masked entries are ignored
  CHECK_NOTHROW(w.validate());
  CHECK(w.observed_count() == 1);
}

TEST_CASE("denoiser input layout") {
  CHECK(denoiser_input_width(8, 2) == 2 * 16 + 8 + 2);
  Matrix noisy = Matrix::Constant(1, 4, 9.0);
  Matrix clean(1, 4);
  clean << 1, 2, 3, 4;
  Matrix mask(1, 2);
  mask << 1, 0;
  const Matrix cond = condition_values(clean, mask, 2);
  CHECK(cond == (Matrix(1, 4) << 1, 2, 0, 0).finished());
  const std::vector<int> steps{25};
  const Matrix in = assemble_denoiser_input(noisy, cond, mask, steps, 100);
  CHECK(in.cols() == 4 + 4 + 2 + 2);
  CHECK(in(0, 0) == 9.0);
  CHECK(in(0, 4) == 1.0);
  CHECK(in(0, 7) == 0.0);
  CHECK(in(0, 8) == 1.0);
  CHECK(in(0, 9) == 0.0);
  CHECK(in(0, 10) == 0.25);
  CHECK(in(0, 11) == 0.0625);
}

TEST_CASE("diffusion loss gradient matches central differences") {
  const NoiseSchedule schedule = build_cosine_schedule(20);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed(seed, "diffusion-grad"));
    const int H = uniform_int(rng, 4, 6);
    const int d = uniform_int(rng, 1, 2);
    DenoiserModel model = make_denoiser(H, d, {uniform_int(rng, 2, 6)}, rng);
    DiffusionBatch batch;
    const int b = uniform_int(rng, 1, 3);
    batch.clean = random_matrix(b, H * d, rng);
    batch.noise = random_matrix(b, H * d, rng);
    batch.mask = Matrix::Zero(b, H);
    for (int r = 0; r < b; ++r) {
      const auto m = make_training_mask(H, rng);
      for (int i = 0; i < H; ++i) batch.mask(r, i) = m[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
      batch.steps.push_back(uniform_int(rng, 1, schedule.steps()));
    }
    const DiffusionLoss loss = diffusion_loss(model, schedule, batch);
    const auto result =
        fdcheck::compare(model.network, loss.gradients, [&] { return diffusion_loss(model, schedule, batch).value; });
    INFO("seed " << seed << ": " << result.where);
    CHECK(result.ok);
  }
}

TEST_CASE("fresh denoiser loss is about one per element") {
  const NoiseSchedule schedule = build_cosine_schedule(100);
  Rng rng(5);
  DenoiserModel model = make_denoiser(8, 2, {32, 32}, rng);
  // Zeroed output layer predicts exactly 0.
  model.network.layers().back().weight.setZero();
  model.network.layers().back().bias.setZero();
  DiffusionBatch batch;
  batch.clean = random_matrix(512, 16, rng);
  batch.noise = random_matrix(512, 16, rng);
  batch.mask = Matrix::Ones(512, 8);
  for (int i = 0; i < 512; ++i) batch.steps.push_back(uniform_int(rng, 1, 100));
  CHECK(diffusion_loss(model, schedule, batch).value == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sampler keeps observed entries bit-exact") {
  const NoiseSchedule schedule = build_cosine_schedule(10);
  Rng rng(6);
  const DenoiserModel model = make_denoiser(6, 2, {16}, rng);
  for (int trial = 0; trial < 200; ++trial) {
    MaskedWindow w{random_matrix(6, 2, rng), {}};
    for (int i = 0; i < 6; ++i) w.observed.push_back(uniform_int(rng, 0, 1) == 1);
    w.observed[static_cast<std::size_t>(uniform_int(rng, 0, 5))] = true;
    const Matrix out = sample_conditional(model, schedule, w, rng);
    for (int i = 0; i < 6; ++i) {
      if (w.observed[static_cast<std::size_t>(i)]) CHECK(out.row(i) == w.values.row(i));
    }
    CHECK(out.allFinite());
  }
}

TEST_CASE("fully observed window comes back unchanged") {
  const NoiseSchedule schedule = build_cosine_schedule(10);
  Rng rng(7);
  const DenoiserModel model = make_denoiser(5, 3, {16}, rng);
  MaskedWindow w{random_matrix(5, 3, rng), std::vector<bool>(5, true)};
  CHECK(sample_conditional(model, schedule, w, rng) == w.values);
}

TEST_CASE("batched sampling equals one-at-a-time sampling") {
  const NoiseSchedule schedule = build_cosine_schedule(10);
  Rng rng(8);
  const DenoiserModel model = make_denoiser(6, 2, {16}, rng);
  std::vector<MaskedWindow> windows;
  for (int i = 0; i < 4; ++i) windows.push_back(rollout_mask(random_matrix(1, 2, rng).row(0), 6));
  std::vector<Rng> a, b;
  for (std::uint64_t i = 0; i < 4; ++i) {
    a.emplace_back(100 + i);
    b.emplace_back(100 + i);
  }
  const auto batched = sample_conditional_batch(model, schedule, windows, a);
  for (std::size_t i = 0; i < 4; ++i) CHECK(batched[i] == sample_conditional(model, schedule, windows[i], b[i]));
}

TEST_CASE("imagined rollout starts at the start state and varies with the seed") {
  const NoiseSchedule schedule = build_cosine_schedule(10);
  Rng init(9);
  const DenoiserModel model = make_denoiser(6, 2, {16}, init);
  RowVector start(2);
  start << 0.3, -1.2;
  Rng r1(1), r2(2);
  const Matrix a = imagine_rollout(model, schedule, start, r1);
  const Matrix b = imagine_rollout(model, schedule, start, r2);
  CHECK(a.rows() == 6);
  CHECK(a.row(0) == start);
  CHECK(b.row(0) == start);
  CHECK(a != b);
}

TEST_CASE("short trajectories are skipped and all-short data is rejected") {
  const NoiseSchedule schedule = build_cosine_schedule(10);
  Dataset ds;
  ds.state_dim = 1;
  ds.action_dim = 1;
  RowVector start(1), vel(1);
  start << 0.0;
  vel << 0.1;
  ds.trajectories.push_back(line_trajectory(start, vel, 5));
  DenoiserTrainConfig cfg;
  cfg.horizon = 8;
  cfg.hidden = {8};
  cfg.steps = 5;
  Rng rng(10);
  CHECK_THROWS_AS(train_denoiser(ds, schedule, cfg, rng), ConfigError);
  ds.trajectories.push_back(line_trajectory(start, vel, 12));
  const DenoiserTrainResult r = train_denoiser(ds, schedule, cfg, rng);
  CHECK(r.trajectories_skipped == 1);
  CHECK(r.windows_available == 5);
  CHECK(r.step_losses.size() == 5);
}

TEST_CASE("constant data trains to constant completions") {
  const NoiseSchedule schedule = build_cosine_schedule(100);
  Dataset ds;
  ds.state_dim = 2;
  ds.action_dim = 1;
  RowVector c = RowVector::Zero(2);
  for (int i = 0; i < 10; ++i) ds.trajectories.push_back(line_trajectory(c, RowVector::Zero(2), 12));
  Rng rng(11);
  const DenoiserModel model = train_on(ds, schedule, 8, 3000, rng, {256, 256}, 256, 1e-3);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix out = imagine_rollout(model, schedule, c, rng);
    worst = std::max(worst, out.cwiseAbs().maxCoeff());
  }
  CHECK(worst < 0.1);
}

TEST_CASE("straight-line motion is inpainted near the line") {
  const NoiseSchedule schedule = build_cosine_schedule(100);
  Dataset ds;
  ds.state_dim = 2;
  ds.action_dim = 1;
  Rng rng(12);
  const int H = 10;
  RowVector vel(2);
  vel << 1.0 / 9.0, 1.0 / 9.0;
  for (int i = 0; i < 200; ++i) {
    RowVector start(2);
    start << uniform_real(rng, -1.0, 1.0), 0.0;
    start(1) = start(0) + uniform_real(rng, -0.5, 0.5);
    ds.trajectories.push_back(line_trajectory(start, vel, H));
  }
  const DenoiserModel model = train_on(ds, schedule, H, 3000, rng, {256, 256}, 256, 1e-3);
  MaskedWindow w{Matrix::Zero(H, 2), std::vector<bool>(H, false)};
  w.observed.front() = true;
  w.observed.back() = true;
  w.values.row(H - 1) << 1.0, 1.0;
  int near = 0, total = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix out = sample_conditional(model, schedule, w, rng);
    for (int i = 1; i + 1 < H; ++i) {
      near += std::abs(out(i, 1) - out(i, 0)) / std::sqrt(2.0) <= 0.15;
      ++total;
    }
  }
  CHECK(static_cast<double>(near) / total >= 0.9);
}

TEST_CASE("rightward motion imagines rightward continuations") {
  const NoiseSchedule schedule = build_cosine_schedule(50);
  Dataset ds;
  ds.state_dim = 2;
  ds.action_dim = 1;
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    RowVector start(2), vel(2);
    start << uniform_real(rng, -2.0, 1.0), uniform_real(rng, -1.0, 1.0);
    vel << uniform_real(rng, 0.05, 0.15), 0.0;
    ds.trajectories.push_back(line_trajectory(start, vel, 16));
  }
  const DenoiserModel model = train_on(ds, schedule, 8, 2000, rng);
  int up = 0, pairs = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix out = imagine_rollout(model, schedule, RowVector::Zero(2), rng);
    for (int i = 0; i + 1 < out.rows(); ++i) {
      up += out(i + 1, 0) >= out(i, 0);
      ++pairs;
    }
  }
  CHECK(static_cast<double>(up) / pairs >= 0.8);
}

TEST_CASE("denoiser training loss trends down") {
  const NoiseSchedule schedule = build_cosine_schedule(50);
  Dataset ds;
  ds.state_dim = 2;
  ds.action_dim = 1;
  Rng rng(14);
  for (int i = 0; i < 40; ++i) {
    RowVector start(2), vel(2);
    start << standard_normal(rng), standard_normal(rng);
    vel << 0.1 * standard_normal(rng), 0.1 * standard_normal(rng);
    ds.trajectories.push_back(line_trajectory(start, vel, 12));
  }
  DenoiserTrainConfig cfg;
  cfg.horizon = 8;
  cfg.hidden = {64, 64};
  cfg.steps = 800;
  const auto r = train_denoiser(ds, schedule, cfg, rng);
  const auto smooth = smooth_curve(r.step_losses, 100);
  CHECK(smooth.back() < smooth[99]);
  CHECK(r.model.network.parameters_finite());
}

TEST_CASE("smooth curve is a trailing mean") {
  const auto s = smooth_curve({1, 2, 3, 4}, 2);
  CHECK(s == std::vector<double>{1.0, 1.5, 2.5, 3.5});
  CHECK_THROWS_AS(smooth_curve({1}, 0), ConfigError);
}
