#include <cmath>

#include "doctest.h"
#include "fd_oracle.hpp"
#include "trajstitch/checkpoint.hpp"
#include "trajstitch/errors.hpp"
#include "trajstitch/loss.hpp"
#include "trajstitch/optimizer.hpp"
#include "trajstitch/training.hpp"

using namespace trajstitch;
using namespace trajstitch::nn;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = standard_normal(rng);
  return m;
}

double mse_of(const Mlp& model, const Matrix& x, const Matrix& y) { return mse_loss(model.forward(x), y).value; }

}  // namespace

TEST_CASE("identity layer passes input through") {
  Mlp net = Mlp::zeros({3, 3}, Activation::kLinear);
  net.layers()[0].weight = Matrix::Identity(3, 3);
  Matrix v(1, 3);
  v << 1.5, -2.0, 0.25;
  CHECK(net.forward(v) == v);
}

TEST_CASE("zero weights output the bias") {
  Mlp net = Mlp::zeros({4, 5, 2}, Activation::kGelu);
  net.layers()[1].bias << 0.7, -3.0;
  Rng rng(1);
  const Matrix out = net.forward(random_matrix(6, 4, rng));
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    CHECK(out(i, 0) == doctest::Approx(0.7));
    CHECK(out(i, 1) == doctest::Approx(-3.0));
  }
}

TEST_CASE("batch rows keep their order") {
  Rng rng(2);
  Mlp net({2, 8, 3}, Activation::kGelu, rng);
  const Matrix x = random_matrix(3, 2, rng);
  const Matrix all = net.forward(x);
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(net.forward(x.row(i)) == all.row(i));
}

TEST_CASE("forward rejects the wrong input width") {
  Rng rng(3);
  Mlp net({2, 4, 1}, Activation::kGelu, rng);
  CHECK_THROWS_AS(net.forward(Matrix::Zero(1, 3)), ShapeError);
}

TEST_CASE("forward is deterministic") {
  Rng rng(4);
  Mlp net({5, 7, 7, 2}, Activation::kGelu, rng);
  const Matrix x = random_matrix(9, 5, rng);
  CHECK(net.forward(x) == net.forward(x));
}

TEST_CASE("analytic gradients match central differences over 100 seeds") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed(seed, "gradcheck"));
    const int depth = uniform_int(rng, 1, 3);
    std::vector<int> widths{uniform_int(rng, 1, 8)};
    for (int l = 0; l < depth; ++l) widths.push_back(uniform_int(rng, 1, 8));
    widths.push_back(uniform_int(rng, 1, 8));
    Mlp net(widths, Activation::kGelu, rng);
    const Matrix x = random_matrix(uniform_int(rng, 1, 6), widths.front(), rng);
    const Matrix y = random_matrix(x.rows(), widths.back(), rng);
    ForwardCache cache;
    const LossResult loss = mse_loss(net.forward(x, cache), y);
    const MlpGradients g = net.backward(cache, loss.gradient);
    const auto result = fdcheck::compare(net, g, [&] { return mse_of(net, x, y); });
    INFO("seed " << seed << ": " << result.where);
    CHECK(result.ok);
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("input gradient matches central differences") {
  Rng rng(5);
  Mlp net({4, 6, 3}, Activation::kGelu, rng);
  Matrix x = random_matrix(2, 4, rng);
  const Matrix y = random_matrix(2, 3, rng);
  ForwardCache cache;
  const LossResult loss = mse_loss(net.forward(x, cache), y);
  Matrix dx;
  net.backward(cache, loss.gradient, &dx);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + 1e-5;
    const double up = mse_of(net, x, y);
    x.data()[i] = saved - 1e-5;
    const double down = mse_of(net, x, y);
    x.data()[i] = saved;
    CHECK(dx.data()[i] == doctest::Approx((up - down) / 2e-5).epsilon(1e-4));
  }
}

TEST_CASE("zero output gradient gives zero parameter gradients") {
  Rng rng(6);
  Mlp net({3, 5, 2}, Activation::kGelu, rng);
  ForwardCache cache;
  const Matrix out = net.forward(random_matrix(4, 3, rng), cache);
  CHECK(net.backward(cache, Matrix::Zero(out.rows(), out.cols())).squared_norm() == 0.0);
}

TEST_CASE("duplicated row doubles its gradient contribution") {
  Rng rng(7);
  Mlp net({3, 5, 2}, Activation::kGelu, rng);
  const Matrix x = random_matrix(1, 3, rng);
  const Matrix dout = random_matrix(1, 2, rng);
  ForwardCache single;
  net.forward(x, single);
  const MlpGradients g1 = net.backward(single, dout);
  Matrix x2(2, 3);
  x2 << x, x;
  Matrix d2(2, 2);
  d2 << dout, dout;
  ForwardCache twice;
  net.forward(x2, twice);
  MlpGradients g2 = net.backward(twice, d2);
  g2.add_scaled(g1, -2.0);
  CHECK(g2.squared_norm() < 1e-24);
}

TEST_CASE("mse loss arithmetic") {
  Matrix p(1, 1), t(1, 1);
  p << 2.0;
  t << 0.0;
  const LossResult r = mse_loss(p, t);
  CHECK(r.value == 4.0);
  CHECK(r.gradient(0, 0) == 4.0);

  Rng rng(8);
  const Matrix a = random_matrix(3, 4, rng);
  const LossResult same = mse_loss(a, a);
  CHECK(same.value == 0.0);
  CHECK(same.gradient.isZero(0.0));

  const Matrix b = random_matrix(3, 4, rng);
  const double base = mse_loss(a, b).value;
  const Matrix scaled = b + 3.0 * (a - b);
  CHECK(mse_loss(scaled, b).value == doctest::Approx(9.0 * base).epsilon(1e-12));
  CHECK_THROWS_AS(mse_loss(a, Matrix::Zero(3, 3)), ShapeError);
}

TEST_CASE("adam first step moves by the learning rate") {
  Mlp net = Mlp::zeros({1, 1}, Activation::kLinear);
  AdamOptimizer opt(net, AdamConfig{});
  MlpGradients g = net.zero_gradients();
  g.layers[0].weight(0, 0) = 0.37;
  opt.step(net, g);
  // m_hat = g, v_hat = g^2, so the update is lr * g / (|g| + eps).
  const double expected = -1e-3 * 0.37 / (0.37 + 1e-8);
  CHECK(net.layers()[0].weight(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(opt.step_count() == 1);
}

TEST_CASE("adam second identical step is no larger than the first") {
  Mlp net = Mlp::zeros({1, 1}, Activation::kLinear);
  AdamOptimizer opt(net, AdamConfig{});
  MlpGradients g = net.zero_gradients();
  g.layers[0].weight(0, 0) = -2.5;
  opt.step(net, g);
  const double first = std::abs(net.layers()[0].weight(0, 0));
  const double before = net.layers()[0].weight(0, 0);
  opt.step(net, g);
  const double second = std::abs(net.layers()[0].weight(0, 0) - before);
  // Hand evaluation: m_hat = g and v_hat = g^2 on both steps here, so the two
  // magnitudes coincide up to epsilon.
  CHECK(second <= first + 1e-15);
  CHECK(opt.step_count() == 2);
}

TEST_CASE("zero gradients leave parameters fixed") {
  Rng rng(9);
  Mlp net({3, 4, 2}, Activation::kGelu, rng);
  const Mlp before = net;
  AdamOptimizer opt(net, AdamConfig{});
  for (int i = 0; i < 50; ++i) opt.step(net, net.zero_gradients());
  CHECK(net == before);
}

TEST_CASE("non-finite gradient aborts the step") {
  Rng rng(10);
  Mlp net({2, 3, 1}, Activation::kGelu, rng);
  const Mlp before = net;
  AdamOptimizer opt(net, AdamConfig{});
  MlpGradients g = net.zero_gradients();
  g.layers[1].bias(0) = std::nan("");
  CHECK_THROWS_AS(opt.step(net, g), TrainingError);
  CHECK(net == before);
  CHECK(opt.step_count() == 0);
}

TEST_CASE("regression fits a linear map") {
  Rng rng(11);
  const Matrix x = random_matrix(256, 3, rng);
  Matrix w(3, 2);
  w << 0.5, -1.0, 2.0, 0.25, -0.75, 1.5;
  const Matrix y = x * w;
  Mlp net({3, 32, 2}, Activation::kGelu, rng);
  const double start = evaluate_mse(net, x, y);
  RegressionConfig cfg;
  cfg.steps = 1500;
  cfg.batch_size = 64;
  cfg.adam.learning_rate = 3e-3;
  const RegressionResult r = fit_regression(net, x, y, cfg, rng);
  CHECK(r.loss_curve.size() == 15);
  CHECK(evaluate_mse(net, x, y) < 0.02 * start);
  CHECK(net.parameters_finite());
}

TEST_CASE("checkpoint round-trips parameters exactly") {
  Rng rng(12);
  Checkpoint c{"test", Mlp({4, 9, 9, 3}, Activation::kGelu, rng), {{"horizon", 32.0}, {"offset", 0.008}}};
  const Checkpoint back = checkpoint_from_json(checkpoint_to_json(c));
  CHECK(back.kind == "test");
  CHECK(back.model == c.model);
  CHECK(back.metadata == c.metadata);
  CHECK(back.model.hidden_activation() == Activation::kGelu);
}

TEST_CASE("checkpoint files reload and reject garbage") {
  Rng rng(13);
  const auto dir = std::filesystem::temp_directory_path() / "trajstitch_nn_test";
  std::filesystem::create_directories(dir);
  Checkpoint c{"fwd", Mlp({2, 3, 2}, Activation::kGelu, rng), {}};
  save_checkpoint(c, dir / "m.json");
  CHECK(load_checkpoint(dir / "m.json").model == c.model);
  CHECK_THROWS_AS(checkpoint_from_json("{\"format_version\": 99}"), SchemaError);
  CHECK_THROWS_AS(checkpoint_from_json("not json"), ConfigError);
  CHECK_THROWS(load_checkpoint(dir / "missing.json"));
  std::filesystem::remove_all(dir);
}
