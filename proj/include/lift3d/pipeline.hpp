#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lift3d/augment.hpp"
#include "lift3d/geometry.hpp"
#include "lift3d/imputer.hpp"
#include "lift3d/net.hpp"

namespace lift3d {

inline constexpr const char* kInterleavedOrdering = "interleaved-uv";

struct TrainingConfig {
  int epochs = 2000;
  int max_iters_per_epoch = 300;
  double learning_rate = 0.001;
  double rmsprop_decay = 0.9;
  double rmsprop_epsilon = 1e-8;
  // Epochs without a validation improvement before stopping.
  int patience = 10;
  // After this many epochs without improvement the learning rate is scaled by
  // lr_decay_factor (at most down to min_learning_rate). factor 1 disables.
  int lr_decay_patience = 3;
  double lr_decay_factor = 0.5;
  double min_learning_rate = 1e-5;
  AugmentationConfig augmentation;
  // Landmarks hidden per training/validation sample; > 0 trains an imputer.
  int missing_count = 0;
  int imputer_tau = 3;
  double depth_weight = 1.0;
  std::uint64_t seed = 1;
  // 0 means full batch.
  int batch_size = 0;
  // Used only when the caller supplies no explicit validation split.
  double validation_fraction = 0.2;
  // Rotated copies per validation shape.
  int validation_factor = 10;
  // Number of 2n-wide hidden layers between input and depth output.
  int hidden_layers = 4;
};

// Throws kInvalidConfig when a field is out of range.
void validate(const TrainingConfig& config);

std::string config_to_json(const TrainingConfig& config);
// Unknown keys are rejected; missing keys keep their defaults.
TrainingConfig config_from_json(const std::string& text);
std::uint64_t config_hash(const TrainingConfig& config);

struct TrainedModel {
  NetworkParams net;
  std::optional<ImputerParams> imputer;
  Eigen::Index n = 0;
  std::string input_ordering = kInterleavedOrdering;
  std::uint64_t config_hash = 0;
  int epochs_run = 0;
  int best_epoch = 0;
  double best_validation_error = 0.0;
};

struct EpochRecord {
  int epoch = 0;
  int iterations = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;       // mean per sample, last iteration
  double validation_loss = 0.0;  // mean per sample
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  bool stopped_early = false;
  // Depth targets outside tanh's range that were clamped.
  long clamped_targets = 0;
};

struct TrainingResult {
  TrainedModel model;
  TrainingHistory history;
};

// Seeded shuffle into (train, validation) by config.validation_fraction.
std::pair<std::vector<Shape3D>, std::vector<Shape3D>> split_dataset(
    const std::vector<Shape3D>& dataset, double validation_fraction, std::uint64_t seed);

TrainingResult train(const std::vector<Shape3D>& dataset, const TrainingConfig& config);
TrainingResult train(const std::vector<Shape3D>& train_shapes,
                     const std::vector<Shape3D>& validation_shapes,
                     const TrainingConfig& config);

// Standardized inputs are rounded to multiples of this before the network
// sees them, so reconstructions do not depend on the last bits lost when
// image scale and translation are removed.
inline constexpr double kInputQuantum = 1.0 / (1 << 20);

// Standardize, impute if needed, predict depth. The result is defined only
// up to scale.
Shape3D reconstruct(const TrainedModel& model, const Landmarks2D& landmarks);

struct EvalReport {
  std::vector<double> per_sample_errors;
  double mean_error = 0.0;
  Eigen::VectorXd per_landmark_mean_residuals;
  double wall_time_seconds = 0.0;
  double reconstructions_per_second = 0.0;
};

// Projects each test shape, optionally adds noise and hides landmarks,
// reconstructs and scores against the shape with procrustes_error.
EvalReport evaluate(const TrainedModel& model, const std::vector<Shape3D>& test_shapes,
                    const WeakPerspectiveCamera& camera, double noise_fraction,
                    int missing_count, Rng& rng);

struct BenchResult {
  long reconstructions = 0;
  double wall_time_seconds = 0.0;
  double reconstructions_per_second = 0.0;
};

// Times reconstruct() over `repetitions` calls on seeded random 2D inputs
// with `missing_count` hidden landmarks each.
BenchResult bench_reconstruct(const TrainedModel& model, long repetitions, int missing_count,
                              std::uint64_t seed);

// Line-oriented text. Timing lines are left out unless requested so reports
// can be diffed.
std::string format_report(const EvalReport& report, bool include_timing);

// One line per epoch plus a summary header.
std::string format_history(const TrainingHistory& history, const TrainedModel& model);

// Checkpoint text (see README for the layout) and file helpers.
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(const std::string& text);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace lift3d
