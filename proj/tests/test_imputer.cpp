#include <doctest.h>

#include <cmath>
#include <random>

#include "lift3d/error.hpp"
#include "lift3d/imputer.hpp"
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

std::vector<bool> random_mask(std::mt19937_64& rng, Eigen::Index n, int missing) {
  std::vector<bool> m(n, true);
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  for (int k = 0; k < missing; ++k) m[idx[k]] = false;
  return m;
}

// The recursion written out coordinate by coordinate.
Eigen::VectorXd slow_impute(const Eigen::MatrixXd& w, const Eigen::VectorXd& lambda,
                            const Eigen::VectorXd& d0, const std::vector<bool>& observed) {
  Eigen::VectorXd prev = d0, out = Eigen::VectorXd::Zero(d0.size());
  for (Eigen::Index s = 0; s < lambda.size(); ++s) {
    Eigen::VectorXd next(d0.size());
    for (Eigen::Index c = 0; c < d0.size(); ++c) {
      if (observed[c / 2]) {
        next[c] = prev[c];
      } else {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < d0.size(); ++k) acc += w(k, c) * prev[k];
        next[c] = acc;
      }
    }
    out += lambda[s] * next;
    prev = next;
  }
  return out;
}

double slow_joint_loss(const Eigen::MatrixXd& w, const Eigen::VectorXd& lambda,
                       const NetworkParams& net, const Eigen::MatrixXd& d0,
                       const std::vector<std::vector<bool>>& observed,
                       const Eigen::MatrixXd& truths, double depth_weight) {
  const Eigen::Index n = net.output_size();
  double total = 0.0;
  for (Eigen::Index j = 0; j < d0.cols(); ++j) {
    const Eigen::VectorXd d = slow_impute(w, lambda, d0.col(j), observed[j]);
    Eigen::VectorXd a = d;
    for (const auto& layer : net.layers) a = (layer.weights * a + layer.bias).array().tanh().matrix();
    Eigen::VectorXd r(3 * n);
    r.head(2 * n) = d - truths.col(j).head(2 * n);
    r.tail(n) = depth_weight * (a - truths.col(j).tail(n));
    total += r.norm();
  }
  return total;
}

}  // namespace

TEST_CASE("lambda invariants") {
  CHECK((linear_lambda(3) - Eigen::Vector3d(1.0 / 6, 2.0 / 6, 3.0 / 6)).cwiseAbs().maxCoeff() <
        1e-16);
  CHECK(linear_lambda(1)[0] == 1.0);
  const Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  CHECK_NOTHROW(ImputerParams(w, Eigen::Vector2d(1.0 / 3, 2.0 / 3)));
  CHECK_THROWS_AS(ImputerParams(w, Eigen::Vector2d(2.0 / 3, 4.0 / 3)), Error);
  CHECK_THROWS_AS(ImputerParams(w, Eigen::Vector2d(0.5, 0.5)), Error);
  CHECK_THROWS_AS(ImputerParams(w, Eigen::Vector2d(0.0, 1.0)), Error);
  CHECK_THROWS_AS(ImputerParams(Eigen::MatrixXd::Zero(4, 3), Eigen::VectorXd::Ones(1)), Error);
  CHECK_THROWS_AS(ImputerParams(w, Eigen::VectorXd()), Error);

  const ImputerParams p = init_imputer(5, linear_lambda(3), 7);
  CHECK(p.weights().rows() == 10);
  CHECK(p.tau() == 3);
  CHECK(p.landmark_count() == 5);
  CHECK(p.weights().cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 20.0));
  CHECK(init_imputer(5, linear_lambda(3), 7).weights() == p.weights());
}

TEST_CASE("build_input") {
  Eigen::Matrix2Xd uv(2, 5);
  uv << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10;
  CHECK(build_input(Landmarks2D(uv)) == interleave(Landmarks2D(uv)));
  const Eigen::VectorXd d = build_input(Landmarks2D(uv, {true, true, false, true, true}));
  CHECK(d[4] == 0.0);
  CHECK(d[5] == 0.0);
  CHECK(d[3] == 7.0);
  const Eigen::VectorXd few = build_input(Landmarks2D(uv, {false, true, false, true, true}));
  CHECK((few.array() == 0.0).count() == 2 * (5 - 3));
}

TEST_CASE("worked example with n = 2") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
  w(0, 2) = 1.0;  // u2 <- u1
  w(1, 3) = 1.0;  // v2 <- v1
  const ImputerParams p(w, Eigen::Vector2d(1.0 / 3, 2.0 / 3));
  const Eigen::Vector4d d0(0.3, -0.3, 0.0, 0.0);
  const std::vector<bool> observed{true, false};
  std::vector<Eigen::MatrixXd> steps;
  const Eigen::MatrixXd out = impute_batch(p, d0, {observed}, &steps);
  REQUIRE(steps.size() == 3);
  const Eigen::Vector4d expect(0.3, -0.3, 0.3, -0.3);
  CHECK((steps[1].col(0) - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((steps[2].col(0) - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((out.col(0) - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((impute(p, d0, observed) - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("impute matches the written-out recursion") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = 4 + t % 5;
    const ImputerParams p(random_matrix(rng, 2 * n, 2 * n, -0.4, 0.4), linear_lambda(1 + t % 4));
    const auto mask = random_mask(rng, n, 1 + t % 2);
    Eigen::VectorXd d0 = random_matrix(rng, 2 * n, 1);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!mask[j]) d0.segment<2>(2 * j).setZero();
    }
    const Eigen::VectorXd fast = impute(p, d0, mask);
    CHECK((fast - slow_impute(p.weights(), p.lambda(), d0, mask)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("identity on complete inputs and bit-exact observed entries") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index n = 3 + t % 10;
    const ImputerParams p(random_matrix(rng, 2 * n, 2 * n), linear_lambda(1 + t % 5));
    const Eigen::VectorXd d0 = random_matrix(rng, 2 * n, 1, -3.0, 3.0);
    CHECK(impute(p, d0, std::vector<bool>(n, true)) == d0);

    const auto mask = random_mask(rng, n, static_cast<int>(t % (n - 2)));
    std::vector<Eigen::MatrixXd> steps;
    const Eigen::MatrixXd out = impute_batch(p, d0, {mask}, &steps);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!mask[j]) continue;
      for (const auto& s : steps) {
        CHECK(s(2 * j, 0) == d0[2 * j]);
        CHECK(s(2 * j + 1, 0) == d0[2 * j + 1]);
      }
      CHECK(out(2 * j, 0) == d0[2 * j]);
      CHECK(out(2 * j + 1, 0) == d0[2 * j + 1]);
    }
  }
}

TEST_CASE("single step ignores lambda") {
  std::mt19937_64 rng(5);
  const ImputerParams p(random_matrix(rng, 8, 8), Eigen::VectorXd::Ones(1));
  const Eigen::VectorXd d0 = random_matrix(rng, 8, 1);
  const std::vector<bool> mask{true, false, true, true};
  std::vector<Eigen::MatrixXd> steps;
  impute_batch(p, d0, {mask}, &steps);
  CHECK(impute(p, d0, mask) == steps[1].col(0));
}

TEST_CASE("forward_joint") {
  std::mt19937_64 rng(6);
  const Eigen::Index n = 5;
  const ImputerParams imp = init_imputer(n, linear_lambda(3), 1);
  const NetworkParams net = init_network(n, 2);
  const Eigen::VectorXd d0 = random_matrix(rng, 2 * n, 1);
  const Eigen::VectorXd full = forward_joint(imp, net, d0, std::vector<bool>(n, true));
  CHECK(full.head(2 * n) == d0);
  CHECK(full.tail(n) == predict(net, d0));

  const NetworkParams zero = zeros_like(net);
  const std::vector<bool> mask{true, true, false, true, true};
  const Eigen::VectorXd z = forward_joint(imp, zero, d0, mask);
  CHECK(z.tail(n).isZero(0.0));
  CHECK(z.head(2 * n) == impute(imp, d0, mask));
}

TEST_CASE("joint loss examples") {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(9);
  CHECK(joint_loss(a, a) == 0.0);
  Eigen::VectorXd b = a;
  b[1] = 3.0;
  b[7] = 4.0;
  CHECK(joint_loss(a, b) == doctest::Approx(5.0));
  // An observed 2D entry still counts.
  Eigen::VectorXd c = a;
  c[0] = 2.0;
  CHECK(joint_loss(a, c) == doctest::Approx(2.0));
  CHECK(joint_loss(a, b, 2.0) == doctest::Approx(std::sqrt(9.0 + 64.0)));
  Eigen::MatrixXd m(9, 2);
  m << b, c;
  CHECK(joint_loss(Eigen::MatrixXd::Zero(9, 2), m, 3) == doctest::Approx(7.0));
}

TEST_CASE("joint gradients match central finite differences") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 5;
    const int m = 10;
    ImputerParams imp(random_matrix(rng, 2 * n, 2 * n, -0.4, 0.4), linear_lambda(3));
    NetworkParams net = init_network(n, 50 + trial);
    for (auto& layer : net.layers) {
      layer.bias = random_matrix(rng, layer.bias.size(), 1, -0.2, 0.2);
    }
    Eigen::MatrixXd d0 = random_matrix(rng, 2 * n, m, -1.5, 1.5);
    std::vector<std::vector<bool>> observed;
    for (int j = 0; j < m; ++j) {
      observed.push_back(random_mask(rng, n, 1 + j % 2));
      for (Eigen::Index k = 0; k < n; ++k) {
        if (!observed[j][k]) d0.block<2, 1>(2 * k, j).setZero();
      }
    }
    const Eigen::MatrixXd truths = random_matrix(rng, 3 * n, m, -0.9, 0.9);
    const double weight = trial % 2 == 0 ? 1.0 : 0.7;

    double analytic = 0.0;
    const JointGradients g = joint_backward(imp, net, d0, observed, truths, weight, &analytic);
    Eigen::MatrixXd w = imp.weights();
    auto f = [&] { return slow_joint_loss(w, imp.lambda(), net, d0, observed, truths, weight); };
    CHECK(analytic == doctest::Approx(f()).epsilon(1e-12));
    CHECK(oracle::relative_error(g.imputer_weights, oracle::finite_difference(w, f)) < 1e-5);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      CHECK(oracle::relative_error(g.net.layers[l].weights,
                                   oracle::finite_difference(net.layers[l].weights, f)) < 1e-5);
      CHECK(oracle::relative_error(g.net.layers[l].bias,
                                   oracle::finite_difference(net.layers[l].bias, f)) < 1e-5);
    }
  }
}
