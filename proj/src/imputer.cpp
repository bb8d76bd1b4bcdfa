#include "lift3d/imputer.hpp"

#include <cmath>
#include <string>

#include "lift3d/error.hpp"
#include "lift3d/random.hpp"

namespace lift3d {

namespace {

constexpr double kLambdaSumTol = 1e-12;

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// 2n x m: true where the coordinate is observed.
BoolArray coordinate_mask(const std::vector<std::vector<bool>>& observed, Eigen::Index n) {
  BoolArray mask(2 * n, static_cast<Eigen::Index>(observed.size()));
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (static_cast<Eigen::Index>(observed[i].size()) != n) {
      fail(ErrorCode::kLengthMismatch, "mask " + std::to_string(i) + " has wrong length");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      mask(2 * j, i) = observed[i][j];
      mask(2 * j + 1, i) = observed[i][j];
    }
  }
  return mask;
}

void check_batch(const ImputerParams& params, const Eigen::MatrixXd& d0,
                 const std::vector<std::vector<bool>>& observed) {
  if (d0.rows() != params.weights().rows()) {
    fail(ErrorCode::kLengthMismatch,
         "imputer expects " + std::to_string(params.weights().rows()) + " coordinates, got " +
             std::to_string(d0.rows()));
  }
  if (static_cast<Eigen::Index>(observed.size()) != d0.cols()) {
    fail(ErrorCode::kLengthMismatch, "one mask per sample required");
  }
}

}  // namespace

ImputerParams::ImputerParams(Eigen::MatrixXd weights, Eigen::VectorXd lambda)
    : weights_(std::move(weights)), lambda_(std::move(lambda)) {
  if (weights_.rows() != weights_.cols() || weights_.rows() % 2 != 0 || weights_.rows() < 2) {
    fail(ErrorCode::kInvalidConfig, "imputer weights must be 2n x 2n with n >= 1");
  }
  if (lambda_.size() < 1) fail(ErrorCode::kInvalidConfig, "imputer needs tau >= 1");
  if (!(lambda_[0] > 0.0)) fail(ErrorCode::kInvalidConfig, "lambda_1 must be positive");
  for (Eigen::Index s = 1; s < lambda_.size(); ++s) {
    if (!(lambda_[s] > lambda_[s - 1])) {
      fail(ErrorCode::kInvalidConfig, "lambda must be strictly increasing");
    }
  }
  if (std::abs(lambda_.sum() - 1.0) > kLambdaSumTol) {
    fail(ErrorCode::kInvalidConfig, "lambda must sum to 1");
  }
}

Eigen::VectorXd linear_lambda(int tau) {
  if (tau < 1) fail(ErrorCode::kInvalidConfig, "tau must be >= 1");
  Eigen::VectorXd lambda = Eigen::VectorXd::LinSpaced(tau, 1.0, static_cast<double>(tau));
  return lambda / lambda.sum();
}

ImputerParams init_imputer(Eigen::Index n, const Eigen::VectorXd& lambda,
                           std::uint64_t seed) {
  const Eigen::Index m = 2 * n;
  Rng rng = make_rng(seed, {0x696d70});
  const double limit = std::sqrt(6.0 / static_cast<double>(2 * m));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Eigen::MatrixXd weights(m, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index k = 0; k < m; ++k) weights(k, c) = dist(rng);
  }
  return ImputerParams(std::move(weights), lambda);
}

Eigen::VectorXd build_input(const Landmarks2D& standardized) {
  return interleave(standardized);
}

Eigen::MatrixXd impute_batch(const ImputerParams& params, const Eigen::MatrixXd& d0,
                             const std::vector<std::vector<bool>>& observed,
                             std::vector<Eigen::MatrixXd>* steps) {
  check_batch(params, d0, observed);
  const BoolArray mask = coordinate_mask(observed, params.landmark_count());
  if (steps) {
    steps->clear();
    steps->push_back(d0);
  }
  Eigen::MatrixXd prev = d0;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d0.rows(), d0.cols());
  for (int s = 0; s < params.tau(); ++s) {
    const Eigen::MatrixXd proposal = params.weights().transpose() * prev;
    Eigen::MatrixXd next = mask.select(prev, proposal);
    out += params.lambda()[s] * next;
    if (steps) steps->push_back(next);
    prev = std::move(next);
  }
  // Observed coordinates must come out bit-identical; the lambda-weighted sum
  // is only exact up to rounding, so copy them back.
  return mask.select(d0, out);
}

Eigen::VectorXd impute(const ImputerParams& params, const Eigen::VectorXd& d0,
                       const std::vector<bool>& observed) {
  return impute_batch(params, d0, {observed}).col(0);
}

Eigen::VectorXd forward_joint(const ImputerParams& imputer, const NetworkParams& net,
                              const Eigen::VectorXd& d0, const std::vector<bool>& observed) {
  if (imputer.weights().rows() != net.input_size() ||
      net.output_size() != imputer.landmark_count()) {
    fail(ErrorCode::kLengthMismatch, "imputer and network disagree on landmark count");
  }
  const Eigen::VectorXd d = impute(imputer, d0, observed);
  Eigen::VectorXd out(d.size() + net.output_size());
  out << d, predict(net, d);
  return out;
}

double joint_loss(const Eigen::VectorXd& output, const Eigen::VectorXd& truth,
                  double depth_weight) {
  if (output.size() != truth.size() || output.size() % 3 != 0) {
    fail(ErrorCode::kLengthMismatch, "joint output and truth lengths differ");
  }
  return joint_loss(Eigen::MatrixXd(output), Eigen::MatrixXd(truth), output.size() / 3,
                    depth_weight);
}

double joint_loss(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& truths,
                  Eigen::Index n, double depth_weight) {
  if (outputs.rows() != truths.rows() || outputs.cols() != truths.cols() ||
      outputs.rows() != 3 * n) {
    fail(ErrorCode::kLengthMismatch, "joint output and truth shapes differ");
  }
  Eigen::MatrixXd residual = outputs - truths;
  residual.bottomRows(n) *= depth_weight;
  return residual.colwise().norm().sum();
}

JointGradients joint_backward(const ImputerParams& imputer, const NetworkParams& net,
                              const Eigen::MatrixXd& d0,
                              const std::vector<std::vector<bool>>& observed,
                              const Eigen::MatrixXd& truths, double depth_weight,
                              double* loss_out) {
  const Eigen::Index n = imputer.landmark_count();
  if (net.input_size() != 2 * n || net.output_size() != n) {
    fail(ErrorCode::kLengthMismatch, "imputer and network disagree on landmark count");
  }
  if (truths.rows() != 3 * n || truths.cols() != d0.cols()) {
    fail(ErrorCode::kLengthMismatch, "truth batch must be 3n x m");
  }
  if (d0.cols() == 0) fail(ErrorCode::kEmptyDataset, "empty batch");

  std::vector<Eigen::MatrixXd> steps;
  const Eigen::MatrixXd d = impute_batch(imputer, d0, observed, &steps);
  std::vector<Eigen::MatrixXd> activations;
  const Eigen::MatrixXd depth = forward_batch(net, d, &activations);

  Eigen::MatrixXd residual(3 * n, d0.cols());
  residual.topRows(2 * n) = d - truths.topRows(2 * n);
  residual.bottomRows(n) = depth_weight * (depth - truths.bottomRows(n));
  if (loss_out) *loss_out = residual.colwise().norm().sum();
  for (Eigen::Index i = 0; i < residual.cols(); ++i) {
    residual.col(i) /= std::max(residual.col(i).norm(), kLossNormEpsilon);
  }

  JointGradients grads;
  Eigen::MatrixXd net_input_grad;
  grads.net = backprop(net, activations, depth_weight * residual.bottomRows(n),
                       &net_input_grad);

  // d loss / d d, the imputer output. The final copy-back of observed entries
  // makes their gradient irrelevant to the recursion: they equal d0.
  const BoolArray mask = coordinate_mask(observed, n);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(2 * n, d0.cols());
  const Eigen::MatrixXd out_grad =
      mask.select(zero, residual.topRows(2 * n) + net_input_grad);

  grads.imputer_weights = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  Eigen::MatrixXd carry = zero;
  for (int s = imputer.tau(); s >= 1; --s) {
    const Eigen::MatrixXd step_grad = carry + imputer.lambda()[s - 1] * out_grad;
    const Eigen::MatrixXd through = mask.select(zero, step_grad);
    grads.imputer_weights.noalias() += steps[s - 1] * through.transpose();
    carry = mask.select(step_grad, zero) + imputer.weights() * through;
  }
  return grads;
}

}  // namespace lift3d
