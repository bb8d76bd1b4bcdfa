#include "lift3d/net.hpp"

#include <string>

#include "lift3d/error.hpp"
#include "lift3d/random.hpp"

namespace lift3d {

Eigen::Index NetworkParams::parameter_count() const {
  Eigen::Index count = 0;
  for (const auto& layer : layers) count += layer.weights.size() + layer.bias.size();
  return count;
}

std::vector<Eigen::Index> default_dims(Eigen::Index n) {
  return {2 * n, 2 * n, 2 * n, 2 * n, 2 * n, n};
}

NetworkParams init_network(Eigen::Index n, std::uint64_t seed) {
  if (n < 3) {
    fail(ErrorCode::kInvalidConfig, "network needs n >= 3, got " + std::to_string(n));
  }
  return init_network(default_dims(n), seed);
}

NetworkParams init_network(const std::vector<Eigen::Index>& dims,
                           std::uint64_t seed) {
  if (dims.size() < 2) fail(ErrorCode::kInvalidConfig, "network needs >= 2 dims");
  for (auto d : dims) {
    if (d < 1) fail(ErrorCode::kInvalidConfig, "layer width must be positive");
  }
  Rng rng = make_rng(seed, {0x6e6574});
  NetworkParams params;
  params.dims = dims;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const Eigen::Index d = dims[l];
    const Eigen::Index r = dims[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(d + r));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer{Eigen::MatrixXd(r, d), Eigen::VectorXd::Zero(r)};
    // Column-major fill order is part of the determinism contract.
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < r; ++i) layer.weights(i, j) = dist(rng);
    }
    params.layers.push_back(std::move(layer));
  }
  return params;
}

NetworkParams zeros_like(const NetworkParams& params) {
  NetworkParams out;
  out.dims = params.dims;
  out.layers.reserve(params.layers.size());
  for (const auto& layer : params.layers) {
    out.layers.push_back({Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                          Eigen::VectorXd::Zero(layer.bias.size())});
  }
  return out;
}

namespace {

void check_input(const NetworkParams& params, Eigen::Index rows) {
  if (rows != params.input_size()) {
    fail(ErrorCode::kLengthMismatch,
         "network expects input of length " + std::to_string(params.input_size()) +
             ", got " + std::to_string(rows));
  }
}

}  // namespace

ForwardResult forward(const NetworkParams& params, const Eigen::VectorXd& input) {
  check_input(params, input.size());
  ForwardResult out;
  out.activations.reserve(params.layers.size() + 1);
  out.activations.push_back(input);
  for (const auto& layer : params.layers) {
    Eigen::VectorXd next =
        (layer.weights * out.activations.back() + layer.bias).array().tanh().matrix();
    out.activations.push_back(std::move(next));
  }
  out.output = out.activations.back();
  return out;
}

Eigen::VectorXd predict(const NetworkParams& params, const Eigen::VectorXd& input) {
  check_input(params, input.size());
  Eigen::VectorXd a = input;
  for (const auto& layer : params.layers) {
    a = (layer.weights * a + layer.bias).array().tanh().matrix();
  }
  return a;
}

Eigen::MatrixXd forward_batch(const NetworkParams& params,
                              const Eigen::MatrixXd& inputs,
                              std::vector<Eigen::MatrixXd>* activations) {
  check_input(params, inputs.rows());
  if (activations) {
    activations->clear();
    activations->reserve(params.layers.size() + 1);
    activations->push_back(inputs);
  }
  Eigen::MatrixXd a = inputs;
  for (const auto& layer : params.layers) {
    Eigen::MatrixXd z = layer.weights * a;
    z.colwise() += layer.bias;
    a = z.array().tanh().matrix();
    if (activations) activations->push_back(a);
  }
  return a;
}

double loss(const std::vector<Eigen::VectorXd>& predictions,
            const std::vector<Eigen::VectorXd>& targets) {
  if (predictions.size() != targets.size()) {
    fail(ErrorCode::kLengthMismatch, "prediction and target counts differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].size() != targets[i].size()) {
      fail(ErrorCode::kLengthMismatch,
           "sample " + std::to_string(i) + " prediction/target lengths differ");
    }
    total += (targets[i] - predictions[i]).norm();
  }
  return total;
}

double loss(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
    fail(ErrorCode::kLengthMismatch, "prediction and target shapes differ");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < predictions.cols(); ++i) {
    total += (targets.col(i) - predictions.col(i)).norm();
  }
  return total;
}

Eigen::MatrixXd loss_gradient(const Eigen::MatrixXd& predictions,
                              const Eigen::MatrixXd& targets) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols()) {
    fail(ErrorCode::kLengthMismatch, "prediction and target shapes differ");
  }
  Eigen::MatrixXd grad = predictions - targets;
  for (Eigen::Index i = 0; i < grad.cols(); ++i) {
    const double norm = grad.col(i).norm();
    grad.col(i) /= std::max(norm, kLossNormEpsilon);
  }
  return grad;
}

NetworkParams backprop(const NetworkParams& params,
                       const std::vector<Eigen::MatrixXd>& activations,
                       const Eigen::MatrixXd& output_grad,
                       Eigen::MatrixXd* input_grad) {
  const std::size_t depth = params.layers.size();
  if (activations.size() != depth + 1) {
    fail(ErrorCode::kLengthMismatch, "activation cache does not match network depth");
  }
  NetworkParams grads = zeros_like(params);
  // delta holds d loss / d pre-activation of the current layer.
  Eigen::MatrixXd delta =
      output_grad.array() * (1.0 - activations[depth].array().square());
  for (std::size_t l = depth; l-- > 0;) {
    grads.layers[l].weights.noalias() = delta * activations[l].transpose();
    grads.layers[l].bias = delta.rowwise().sum();
    if (l > 0 || input_grad) {
      Eigen::MatrixXd upstream = params.layers[l].weights.transpose() * delta;
      if (l == 0) {
        *input_grad = std::move(upstream);
      } else {
        delta = upstream.array() * (1.0 - activations[l].array().square());
      }
    }
  }
  return grads;
}

NetworkParams backward(const NetworkParams& params,
                       const Eigen::MatrixXd& inputs,
                       const Eigen::MatrixXd& targets,
                       double* loss_out) {
  if (inputs.cols() == 0) fail(ErrorCode::kEmptyDataset, "empty batch");
  if (targets.rows() != params.output_size() || targets.cols() != inputs.cols()) {
    fail(ErrorCode::kLengthMismatch, "target batch shape does not match network");
  }
  std::vector<Eigen::MatrixXd> activations;
  const Eigen::MatrixXd out = forward_batch(params, inputs, &activations);
  if (loss_out) *loss_out = loss(out, targets);
  return backprop(params, activations, loss_gradient(out, targets));
}

RmsPropState make_rmsprop_state(const NetworkParams& params,
                                const RmsPropConfig& config) {
  if (!(config.epsilon > 0.0) || !(config.learning_rate > 0.0) ||
      !(config.decay > 0.0 && config.decay < 1.0)) {
    fail(ErrorCode::kInvalidConfig, "RMSProp needs lr > 0, eps > 0, decay in (0,1)");
  }
  return {config, zeros_like(params)};
}

void rmsprop_step(NetworkParams& params, const NetworkParams& gradients,
                  RmsPropState& state) {
  if (params.layers.size() != gradients.layers.size() ||
      params.layers.size() != state.mean_square.layers.size()) {
    fail(ErrorCode::kLengthMismatch, "parameter, gradient and state depths differ");
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& layer = params.layers[l];
    auto& ms = state.mean_square.layers[l];
    const auto& g = gradients.layers[l];
    if (layer.weights.rows() != g.weights.rows() || layer.weights.cols() != g.weights.cols()) {
      fail(ErrorCode::kLengthMismatch, "layer " + std::to_string(l) + " gradient shape differs");
    }
    rmsprop_update(layer.weights, g.weights, ms.weights, state.config);
    rmsprop_update(layer.bias, g.bias, ms.bias, state.config);
  }
}

}  // namespace lift3d
