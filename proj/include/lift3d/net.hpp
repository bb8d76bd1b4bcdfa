#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <vector>

namespace lift3d {

struct DenseLayer {
  Eigen::MatrixXd weights;  // r x d
  Eigen::VectorXd bias;     // r
};

// Stack of tanh layers; layer l maps dims[l] -> dims[l + 1].
struct NetworkParams {
  std::vector<Eigen::Index> dims;
  std::vector<DenseLayer> layers;

  Eigen::Index input_size() const { return dims.front(); }
  Eigen::Index output_size() const { return dims.back(); }
  Eigen::Index parameter_count() const;
};

// [2n, 2n, 2n, 2n, 2n, n]
std::vector<Eigen::Index> default_dims(Eigen::Index n);

// Weights uniform in +-sqrt(6 / (d + r)), biases zero. Deterministic in seed.
NetworkParams init_network(Eigen::Index n, std::uint64_t seed);
NetworkParams init_network(const std::vector<Eigen::Index>& dims,
                           std::uint64_t seed);

// Same shapes, every entry zero. Used for gradients and optimizer state.
NetworkParams zeros_like(const NetworkParams& params);

struct ForwardResult {
  Eigen::VectorXd output;
  std::vector<Eigen::VectorXd> activations;  // a[0] = input, a[L] = output
};

ForwardResult forward(const NetworkParams& params, const Eigen::VectorXd& input);

// Output only, for inference.
Eigen::VectorXd predict(const NetworkParams& params, const Eigen::VectorXd& input);

// Column-per-sample batch. When `activations` is non-null it receives every
// layer's activation matrix, input first.
Eigen::MatrixXd forward_batch(const NetworkParams& params,
                              const Eigen::MatrixXd& inputs,
                              std::vector<Eigen::MatrixXd>* activations = nullptr);

// Sum over samples of the unsquared Euclidean residual norm.
double loss(const std::vector<Eigen::VectorXd>& predictions,
            const std::vector<Eigen::VectorXd>& targets);
double loss(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets);

// Guard against the norm singularity at zero residual.
inline constexpr double kLossNormEpsilon = 1e-12;

// d loss / d predictions, column by column: -(t - p) / max(|t - p|, eps).
Eigen::MatrixXd loss_gradient(const Eigen::MatrixXd& predictions,
                              const Eigen::MatrixXd& targets);

// Chain rule through the cached activations given d loss / d output.
// Writes d loss / d input into `input_grad` when non-null.
NetworkParams backprop(const NetworkParams& params,
                       const std::vector<Eigen::MatrixXd>& activations,
                       const Eigen::MatrixXd& output_grad,
                       Eigen::MatrixXd* input_grad = nullptr);

// Gradient of loss(forward_batch(inputs), targets) with respect to every
// weight and bias. Optionally reports the loss itself.
NetworkParams backward(const NetworkParams& params,
                       const Eigen::MatrixXd& inputs,
                       const Eigen::MatrixXd& targets,
                       double* loss_out = nullptr);

struct RmsPropConfig {
  double learning_rate = 0.01;
  double decay = 0.9;
  double epsilon = 1e-8;
};

// ms <- rho * ms + (1 - rho) * g^2;  theta <- theta - lr * g / (sqrt(ms) + eps)
template <typename Param, typename Grad, typename Acc>
void rmsprop_update(Eigen::MatrixBase<Param>& param,
                    const Eigen::MatrixBase<Grad>& grad,
                    Eigen::MatrixBase<Acc>& mean_square,
                    const RmsPropConfig& config) {
  mean_square.array() = config.decay * mean_square.array() +
                        (1.0 - config.decay) * grad.array().square();
  param.array() -= config.learning_rate * grad.array() /
                   (mean_square.array().sqrt() + config.epsilon);
}

struct RmsPropState {
  RmsPropConfig config;
  NetworkParams mean_square;
};

RmsPropState make_rmsprop_state(const NetworkParams& params,
                                const RmsPropConfig& config);

// Updates params and state in place.
void rmsprop_step(NetworkParams& params, const NetworkParams& gradients,
                  RmsPropState& state);

}  // namespace lift3d
