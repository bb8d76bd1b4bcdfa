#include "lift3d/augment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "lift3d/error.hpp"

namespace lift3d {

AugmentationConfig body_preset() { return AugmentationConfig{}; }

AugmentationConfig face_preset() {
  AugmentationConfig config;
  config.rz = {-60.0, 60.0};
  return config;
}

void validate(const AugmentationConfig& config) {
  for (const Interval* range : {&config.rx, &config.ry, &config.rz}) {
    if (!(range->lo <= range->hi)) {
      fail(ErrorCode::kInvalidConfig, "rotation interval is not ordered");
    }
  }
  if (!(config.noise_fraction >= 0.0 && config.noise_fraction <= 0.2)) {
    fail(ErrorCode::kInvalidConfig, "noise_fraction must lie in [0, 0.2]");
  }
  if (!(config.camera_lambda.lo > 0.0 && config.camera_lambda.lo <= config.camera_lambda.hi)) {
    fail(ErrorCode::kInvalidConfig, "camera_lambda must be a positive ordered interval");
  }
}

EulerAngles sample_rotation(const AugmentationConfig& config, Rng& rng) {
  EulerAngles angles;
  angles.rx = uniform(rng, config.rx.lo, config.rx.hi);
  angles.ry = uniform(rng, config.ry.lo, config.ry.hi);
  angles.rz = uniform(rng, config.rz.lo, config.rz.hi);
  return angles;
}

double object_size(const Landmarks2D& landmarks) {
  Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector2d hi = -lo;
  for (Eigen::Index j = 0; j < landmarks.size(); ++j) {
    if (!landmarks.observed()[j]) continue;
    lo = lo.cwiseMin(landmarks.coords().col(j));
    hi = hi.cwiseMax(landmarks.coords().col(j));
  }
  return (hi - lo).maxCoeff();
}

Landmarks2D add_landmark_noise(const Landmarks2D& landmarks,
                               double noise_fraction, Rng& rng) {
  if (noise_fraction == 0.0) return landmarks;
  if (!(noise_fraction > 0.0)) {
    fail(ErrorCode::kInvalidConfig, "noise_fraction must be non-negative");
  }
  std::normal_distribution<double> gauss(0.0, noise_fraction * object_size(landmarks));
  Eigen::Matrix2Xd coords = landmarks.coords();
  for (Eigen::Index j = 0; j < coords.cols(); ++j) {
    if (!landmarks.observed()[j]) continue;
    coords(0, j) += gauss(rng);
    coords(1, j) += gauss(rng);
  }
  return Landmarks2D(std::move(coords), landmarks.observed());
}

bool Batch::has_missing() const {
  for (const auto& mask : observed) {
    if (std::find(mask.begin(), mask.end(), false) != mask.end()) return true;
  }
  return false;
}

Eigen::Index common_landmark_count(const std::vector<Shape3D>& shapes) {
  if (shapes.empty()) fail(ErrorCode::kEmptyDataset, "no shapes given");
  const Eigen::Index n = shapes.front().size();
  for (std::size_t i = 1; i < shapes.size(); ++i) {
    if (shapes[i].size() != n) {
      fail(ErrorCode::kHeterogeneousLandmarkCount,
           "shape " + std::to_string(i) + " has " + std::to_string(shapes[i].size()) +
               " landmarks, expected " + std::to_string(n));
    }
  }
  return n;
}

std::vector<bool> sample_missing_mask(Eigen::Index n, int count, Rng& rng) {
  if (count < 0) fail(ErrorCode::kInvalidConfig, "missing count must be >= 0");
  std::vector<bool> observed(n, true);
  if (count == 0) return observed;
  if (n - count < 3) {
    fail(ErrorCode::kInvalidConfig, "hiding " + std::to_string(count) +
                                        " landmarks leaves fewer than 3 observed");
  }
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Partial Fisher-Yates; only the first `count` slots matter.
  for (int k = 0; k < count; ++k) {
    std::uniform_int_distribution<Eigen::Index> pick(k, n - 1);
    std::swap(order[k], order[pick(rng)]);
    observed[order[k]] = false;
  }
  return observed;
}

namespace {

class BatchBuilder {
 public:
  BatchBuilder(Eigen::Index n, Eigen::Index samples) {
    batch_.inputs.resize(2 * n, samples);
    batch_.targets.resize(n, samples);
    batch_.truth_uv.resize(2 * n, samples);
    batch_.observed.reserve(samples);
  }

  // Views `shape` through the camera, applies noise and hiding, and appends
  // the standardized sample.
  void add(const Shape3D& shape, const AugmentationConfig& config, Rng& rng,
           int missing_count) {
    const Eigen::Index col = static_cast<Eigen::Index>(batch_.observed.size());
    std::vector<bool> observed = sample_missing_mask(shape.size(), missing_count, rng);
    const double lambda = uniform(rng, config.camera_lambda.lo, config.camera_lambda.hi);

    const Standardized3D truth = standardize_3d(shape, observed);
    Landmarks2D view(project_weak_perspective(shape, {lambda}).coords(), observed);
    Landmarks2D input = standardize_2d(view).landmarks;
    if (config.noise_fraction > 0.0) {
      input = add_landmark_noise(input, config.noise_fraction, rng);
    }

    batch_.inputs.col(col) = interleave(input);
    batch_.targets.col(col) = truth.shape.coords().row(2).transpose();
    batch_.truth_uv.col(col) = interleave_xy(truth.shape);
    batch_.observed.push_back(std::move(observed));
  }

  Batch take() { return std::move(batch_); }

 private:
  Batch batch_;
};

}  // namespace

Batch make_epoch_batch(const std::vector<Shape3D>& shapes,
                       const AugmentationConfig& config, Rng& rng,
                       bool first_epoch, int missing_count) {
  validate(config);
  const Eigen::Index n = common_landmark_count(shapes);
  BatchBuilder builder(n, static_cast<Eigen::Index>(shapes.size()));
  const EulerAngles shared = sample_rotation(config, rng);
  for (const auto& shape : shapes) {
    if (first_epoch) {
      builder.add(shape, config, rng, missing_count);
      continue;
    }
    const EulerAngles angles = config.per_shape_rotation ? sample_rotation(config, rng) : shared;
    builder.add(rotate_shape(shape, angles), config, rng, missing_count);
  }
  return builder.take();
}

Batch expand_validation(const std::vector<Shape3D>& shapes, int factor,
                        const AugmentationConfig& config, Rng& rng,
                        int missing_count) {
  validate(config);
  if (factor < 1) fail(ErrorCode::kInvalidConfig, "validation factor must be >= 1");
  const Eigen::Index n = common_landmark_count(shapes);
  BatchBuilder builder(n, static_cast<Eigen::Index>(shapes.size()) * factor);
  for (const auto& shape : shapes) {
    for (int k = 0; k < factor; ++k) {
      builder.add(rotate_shape(shape, sample_rotation(config, rng)), config, rng,
                  missing_count);
    }
  }
  return builder.take();
}

}  // namespace lift3d
