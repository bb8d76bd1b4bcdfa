#include <doctest.h>

#include <cmath>
#include <random>

#include "lift3d/error.hpp"
#include "lift3d/net.hpp"
#include "oracles.hpp"

using namespace lift3d;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c,
                              double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

// Loss as a plain function of the parameters, evaluated sample by sample.
double slow_loss(const NetworkParams& p, const Eigen::MatrixXd& x, const Eigen::MatrixXd& t) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::VectorXd a = x.col(j);
    for (const auto& layer : p.layers) a = (layer.weights * a + layer.bias).array().tanh().matrix();
    total += (t.col(j) - a).norm();
  }
  return total;
}

void randomize(NetworkParams& p, std::mt19937_64& rng) {
  for (auto& layer : p.layers) {
    layer.weights = random_matrix(rng, layer.weights.rows(), layer.weights.cols(), -0.6, 0.6);
    layer.bias = random_matrix(rng, layer.bias.size(), 1, -0.2, 0.2);
  }
}

}  // namespace

TEST_CASE("architecture and initialization") {
  const auto dims = default_dims(15);
  CHECK(dims == std::vector<Eigen::Index>{30, 30, 30, 30, 30, 15});
  const NetworkParams a = init_network(15, 99);
  const NetworkParams b = init_network(15, 99);
  REQUIRE(a.layers.size() == 5);
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    CHECK(a.layers[l].weights.rows() == dims[l + 1]);
    CHECK(a.layers[l].weights.cols() == dims[l]);
    CHECK(a.layers[l].weights == b.layers[l].weights);
    CHECK(a.layers[l].bias.isZero(0.0));
    const double limit = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    CHECK(a.layers[l].weights.cwiseAbs().maxCoeff() <= limit);
    CHECK(a.layers[l].weights.cwiseAbs().maxCoeff() > 0.5 * limit);
  }
  CHECK(init_network(15, 100).layers[0].weights != a.layers[0].weights);
  CHECK(a.parameter_count() == 4 * (30 * 30 + 30) + 30 * 15 + 15);
}

TEST_CASE("forward examples") {
  NetworkParams zero = zeros_like(init_network(4, 1));
  std::mt19937_64 rng(1);
  const Eigen::VectorXd x = random_matrix(rng, 8, 1);
  CHECK(forward(zero, x).output.isZero(0.0));

  NetworkParams tiny = init_network(std::vector<Eigen::Index>{1, 1}, 0);
  tiny.layers[0].weights(0, 0) = 1.0;
  tiny.layers[0].bias(0) = 0.0;
  const double y = forward(tiny, Eigen::VectorXd::Constant(1, 0.5)).output(0);
  CHECK(y == doctest::Approx(std::tanh(0.5)).epsilon(1e-15));
  CHECK(y == doctest::Approx(0.46212).epsilon(1e-5));

  NetworkParams big = init_network(6, 3);
  randomize(big, rng);
  for (auto& layer : big.layers) layer.weights *= 5.0;
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd in = random_matrix(rng, 12, 1, -3.0, 3.0);
    const auto r = forward(big, in);
    CHECK(r.output.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(r.activations.size() == 6);
    CHECK(r.activations.front() == in);
    CHECK(r.activations.back() == r.output);
    CHECK(predict(big, in) == r.output);
    CHECK(forward(big, in).output == r.output);
  }
}

TEST_CASE("batch forward matches per-sample forward") {
  std::mt19937_64 rng(2);
  NetworkParams p = init_network(5, 4);
  randomize(p, rng);
  const Eigen::MatrixXd x = random_matrix(rng, 10, 7);
  const Eigen::MatrixXd y = forward_batch(p, x);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    CHECK((y.col(j) - predict(p, x.col(j))).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("loss examples and properties") {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(4, 2);
  CHECK(loss(p, p) == 0.0);
  Eigen::MatrixXd t = p;
  t.col(0) << 3, 4, 0, 0;
  CHECK(loss(p.leftCols(1), t.leftCols(1)) == doctest::Approx(5.0));
  t.col(1) << 0, 5, 12, 0;
  CHECK(loss(p, t) == doctest::Approx(5.0 + 13.0));
  t.col(1) << 12, 0, 0, 0;
  CHECK(loss(p, t) == doctest::Approx(17.0));
  std::vector<Eigen::VectorXd> pv{p.col(0), p.col(1)}, tv{t.col(0), t.col(1)};
  CHECK(loss(pv, tv) == doctest::Approx(17.0));

  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Eigen::MatrixXd a = random_matrix(rng, 5, 3);
    const Eigen::MatrixXd b = random_matrix(rng, 5, 3);
    CHECK(loss(a, b) > 0.0);
    CHECK(loss(a, a) == 0.0);
  }
  CHECK_THROWS_AS(loss(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 2)), Error);
}

TEST_CASE("zero residual gives a zero gradient") {
  std::mt19937_64 rng(4);
  NetworkParams p = init_network(5, 8);
  randomize(p, rng);
  const Eigen::MatrixXd x = random_matrix(rng, 10, 6);
  const Eigen::MatrixXd targets = forward_batch(p, x);
  double l = -1.0;
  const NetworkParams g = backward(p, x, targets, &l);
  CHECK(l == 0.0);
  for (const auto& layer : g.layers) {
    CHECK(layer.weights.isZero(0.0));
    CHECK(layer.bias.isZero(0.0));
  }
}

TEST_CASE("backward matches central finite differences") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    NetworkParams p = init_network(5, 100 + trial);
    randomize(p, rng);
    const Eigen::MatrixXd x = random_matrix(rng, 10, 10, -2.0, 2.0);
    const Eigen::MatrixXd t = random_matrix(rng, 5, 10, -0.9, 0.9);
    double analytic_loss = 0.0;
    const NetworkParams g = backward(p, x, t, &analytic_loss);
    CHECK(analytic_loss == doctest::Approx(slow_loss(p, x, t)).epsilon(1e-12));
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      auto f = [&] { return slow_loss(p, x, t); };
      const Eigen::MatrixXd gw = oracle::finite_difference(p.layers[l].weights, f);
      const Eigen::VectorXd gb = oracle::finite_difference(p.layers[l].bias, f);
      CHECK(oracle::relative_error(g.layers[l].weights, gw) < 1e-5);
      CHECK(oracle::relative_error(g.layers[l].bias, gb) < 1e-5);
    }
  }
}

TEST_CASE("gradient check on random architectures") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> width(1, 7);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Eigen::Index> dims;
    const int depth = 2 + trial % 4;
    for (int k = 0; k < depth; ++k) dims.push_back(width(rng));
    NetworkParams p = init_network(dims, trial);
    randomize(p, rng);
    const Eigen::MatrixXd x = random_matrix(rng, dims.front(), 4);
    const Eigen::MatrixXd t = random_matrix(rng, dims.back(), 4);
    const NetworkParams g = backward(p, x, t);
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
      auto f = [&] { return slow_loss(p, x, t); };
      CHECK(oracle::relative_error(g.layers[l].weights,
                                   oracle::finite_difference(p.layers[l].weights, f)) < 1e-5);
      CHECK(oracle::relative_error(g.layers[l].bias,
                                   oracle::finite_difference(p.layers[l].bias, f)) < 1e-5);
    }
  }
}

TEST_CASE("batch gradient is the sum of per-sample gradients") {
  std::mt19937_64 rng(7);
  NetworkParams p = init_network(4, 1);
  randomize(p, rng);
  const Eigen::MatrixXd x = random_matrix(rng, 8, 2);
  const Eigen::MatrixXd t = random_matrix(rng, 4, 2);
  const NetworkParams both = backward(p, x, t);
  const NetworkParams a = backward(p, x.col(0), t.col(0));
  const NetworkParams b = backward(p, x.col(1), t.col(1));
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    CHECK((both.layers[l].weights - a.layers[l].weights - b.layers[l].weights)
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK((both.layers[l].bias - a.layers[l].bias - b.layers[l].bias).cwiseAbs().maxCoeff() <
          1e-14);
  }
}

TEST_CASE("rmsprop worked example") {
  RmsPropConfig cfg{0.01, 0.9, 1e-8};
  Eigen::MatrixXd theta = Eigen::MatrixXd::Constant(1, 1, 1.0);
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(1, 1, 2.0);
  Eigen::MatrixXd ms = Eigen::MatrixXd::Zero(1, 1);
  rmsprop_update(theta, g, ms, cfg);
  CHECK(ms(0, 0) == doctest::Approx(0.4).epsilon(1e-15));
  const double step = 0.01 * 2.0 / (std::sqrt(0.4) + 1e-8);
  CHECK(1.0 - theta(0, 0) == doctest::Approx(step).epsilon(1e-12));
  CHECK(1.0 - theta(0, 0) == doctest::Approx(0.031623).epsilon(1e-4));
}

TEST_CASE("rmsprop zero gradient and gradient scaling") {
  std::mt19937_64 rng(8);
  NetworkParams p = init_network(4, 2);
  RmsPropState state = make_rmsprop_state(p, {});
  for (auto& layer : state.mean_square.layers) layer.weights.setConstant(0.5);
  const NetworkParams before = p;
  rmsprop_step(p, zeros_like(p), state);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    CHECK(p.layers[l].weights == before.layers[l].weights);
    CHECK(state.mean_square.layers[l].weights.isConstant(0.45, 1e-15));
  }

  NetworkParams g = zeros_like(p);
  for (auto& layer : g.layers) layer.weights = random_matrix(rng, layer.weights.rows(), layer.weights.cols());
  NetworkParams g10 = g;
  for (auto& layer : g10.layers) layer.weights *= 10.0;
  NetworkParams p1 = before, p2 = before;
  RmsPropState s1 = make_rmsprop_state(p1, {}), s2 = make_rmsprop_state(p2, {});
  rmsprop_step(p1, g, s1);
  rmsprop_step(p2, g10, s2);
  // With ms = 0 the step is lr * g / (sqrt(0.1) |g| + eps); the two differ
  // only through eps.
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const Eigen::ArrayXXd gap = (p1.layers[l].weights - p2.layers[l].weights).array().abs();
    const Eigen::ArrayXXd bound =
        0.01 * 1e-8 / (0.1 * g.layers[l].weights.array().square()) + 1e-15;
    CHECK((gap <= bound).all());
    CHECK(((before.layers[l].weights - p1.layers[l].weights).array().abs() -
           0.01 / std::sqrt(0.1))
              .abs()
              .maxCoeff() < 1e-4);
  }

  CHECK_THROWS_AS(make_rmsprop_state(p, {0.01, 1.5, 1e-8}), Error);
}

TEST_CASE("one small rmsprop step decreases a single-sample loss") {
  std::mt19937_64 rng(9);
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    NetworkParams p = init_network(5, 1000 + trial);
    randomize(p, rng);
    const Eigen::MatrixXd x = random_matrix(rng, 10, 1);
    const Eigen::MatrixXd t = random_matrix(rng, 5, 1, -0.9, 0.9);
    double before = 0.0;
    const NetworkParams g = backward(p, x, t, &before);
    RmsPropState state = make_rmsprop_state(p, {1e-4, 0.9, 1e-8});
    rmsprop_step(p, g, state);
    if (!(loss(forward_batch(p, x), t) < before)) ++failures;
  }
  CHECK(failures == 0);
}
