#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "lift3d/geometry.hpp"
#include "lift3d/random.hpp"

namespace lift3d {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct AugmentationConfig {
  Interval rx{-20.0, 20.0};
  Interval ry{-20.0, 20.0};
  Interval rz{-180.0, 180.0};
  // Std of the 2D landmark noise as a fraction of the object's 2D size.
  double noise_fraction = 0.0;
  // Sampled for every view; cancels under standardization.
  Interval camera_lambda{0.5, 2.0};
  // false: one rotation shared by the whole batch.
  bool per_shape_rotation = true;
};

// x, y in [-20, 20], z in [-180, 180] degrees (articulated bodies).
AugmentationConfig body_preset();
// As body_preset with z restricted to [-60, 60] (heads).
AugmentationConfig face_preset();

// Throws kInvalidConfig on unordered intervals, noise outside [0, 0.2] or a
// non-positive camera range.
void validate(const AugmentationConfig& config);

EulerAngles sample_rotation(const AugmentationConfig& config, Rng& rng);

// Larger of the u and v extents over observed landmarks.
double object_size(const Landmarks2D& landmarks);

// Adds N(0, (noise_fraction * object_size)^2) to every observed coordinate.
Landmarks2D add_landmark_noise(const Landmarks2D& landmarks,
                               double noise_fraction, Rng& rng);

// Column-per-sample training data. Inputs are interleaved (u1, v1, u2, ...)
// with missing landmarks zeroed; truth_uv holds the noise-free standardized
// 2D of every landmark in the same frame as the inputs.
struct Batch {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;
  Eigen::MatrixXd truth_uv;
  std::vector<std::vector<bool>> observed;

  Eigen::Index size() const { return inputs.cols(); }
  Eigen::Index landmark_count() const { return targets.rows(); }
  bool has_missing() const;
};

// Landmark count shared by every shape; throws kEmptyDataset or
// kHeterogeneousLandmarkCount.
Eigen::Index common_landmark_count(const std::vector<Shape3D>& shapes);

// One view per shape: unrotated on the first epoch, otherwise freshly
// rotated. `missing_count` landmarks per sample are hidden uniformly at
// random, and statistics then come from the observed ones.
Batch make_epoch_batch(const std::vector<Shape3D>& shapes,
                       const AugmentationConfig& config, Rng& rng,
                       bool first_epoch, int missing_count = 0);

// factor independently rotated copies of every shape (factor * |shapes|
// samples). Copies of one shape are contiguous.
Batch expand_validation(const std::vector<Shape3D>& shapes, int factor,
                        const AugmentationConfig& config, Rng& rng,
                        int missing_count = 0);

// Picks `count` distinct landmarks to hide.
std::vector<bool> sample_missing_mask(Eigen::Index n, int count, Rng& rng);

}  // namespace lift3d
