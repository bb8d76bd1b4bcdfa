#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "lift3d/geometry.hpp"
#include "lift3d/net.hpp"

namespace lift3d {

// Recurrent layer that fills in missing standardized 2D coordinates.
// Column c of `weights` produces coordinate c of the next iterate from the
// whole previous iterate. The activation is the identity.
class ImputerParams {
 public:
  ImputerParams() = default;
  // Throws kInvalidConfig unless weights are 2n x 2n, tau >= 1 and
  // 0 < lambda_1 < ... < lambda_tau with sum 1.
  ImputerParams(Eigen::MatrixXd weights, Eigen::VectorXd lambda);

  const Eigen::MatrixXd& weights() const { return weights_; }
  Eigen::MatrixXd& mutable_weights() { return weights_; }
  const Eigen::VectorXd& lambda() const { return lambda_; }
  int tau() const { return static_cast<int>(lambda_.size()); }
  Eigen::Index landmark_count() const { return weights_.rows() / 2; }

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd lambda_;
};

// (1, 2, ..., tau) / (tau (tau + 1) / 2)
Eigen::VectorXd linear_lambda(int tau);

// Fan-based uniform weights, like the dense layers.
ImputerParams init_imputer(Eigen::Index n, const Eigen::VectorXd& lambda,
                           std::uint64_t seed);

// Interleaved standardized coordinates with missing landmarks zeroed.
Eigen::VectorXd build_input(const Landmarks2D& standardized);

// Runs the tau-step recursion and returns sum_s lambda_s d^(s). Observed
// coordinates are copied through every step unchanged.
Eigen::VectorXd impute(const ImputerParams& params, const Eigen::VectorXd& d0,
                       const std::vector<bool>& observed);

// Column-per-sample. `steps`, when non-null, receives d^(0) ... d^(tau).
Eigen::MatrixXd impute_batch(const ImputerParams& params, const Eigen::MatrixXd& d0,
                             const std::vector<std::vector<bool>>& observed,
                             std::vector<Eigen::MatrixXd>* steps = nullptr);

// (imputed interleaved 2D, depth): the 3n merged output.
Eigen::VectorXd forward_joint(const ImputerParams& imputer, const NetworkParams& net,
                              const Eigen::VectorXd& d0, const std::vector<bool>& observed);

// Euclidean norm of the full 3n residual; the batch form sums over columns.
// depth_weight scales the depth part of the residual.
double joint_loss(const Eigen::VectorXd& output, const Eigen::VectorXd& truth,
                  double depth_weight = 1.0);
double joint_loss(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& truths,
                  Eigen::Index n, double depth_weight = 1.0);

struct JointGradients {
  Eigen::MatrixXd imputer_weights;
  NetworkParams net;
};

// Exact gradient of the batch joint loss through the unrolled recursion.
// truths is 3n x m: interleaved 2D rows then depth rows.
JointGradients joint_backward(const ImputerParams& imputer, const NetworkParams& net,
                              const Eigen::MatrixXd& d0,
                              const std::vector<std::vector<bool>>& observed,
                              const Eigen::MatrixXd& truths, double depth_weight = 1.0,
                              double* loss_out = nullptr);

}  // namespace lift3d
