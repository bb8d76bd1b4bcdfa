#include "lift3d/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <string>

#include "lift3d/error.hpp"
#include "lift3d/random.hpp"
#include "lift3d/text_io.hpp"

namespace lift3d {

namespace {

// Stream ids for derive_seed.
enum : std::uint64_t { kInitStream = 1, kValidationStream = 2, kEpochStream = 3, kSplitStream = 4,
                         kBenchStream = 5 };

constexpr double kTargetLimit = 0.999;

long clamp_targets(Eigen::MatrixXd& targets) {
  long clamped = 0;
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    double& t = targets.data()[i];
    if (t > kTargetLimit) {
      t = kTargetLimit;
      ++clamped;
    } else if (t < -kTargetLimit) {
      t = -kTargetLimit;
      ++clamped;
    }
  }
  return clamped;
}

std::vector<Eigen::Index> network_dims(Eigen::Index n, int hidden_layers) {
  std::vector<Eigen::Index> dims(static_cast<std::size_t>(hidden_layers) + 1, 2 * n);
  dims.push_back(n);
  return dims;
}

Eigen::MatrixXd joint_truth(const Batch& batch) {
  Eigen::MatrixXd truth(3 * batch.landmark_count(), batch.size());
  truth << batch.truth_uv, batch.targets;
  return truth;
}

// Per-sample mean validation loss of the current parameters.
double validation_loss(const NetworkParams& net, const std::optional<ImputerParams>& imputer,
                       const Batch& val, const Eigen::MatrixXd& val_joint_truth,
                       double depth_weight) {
  const double m = static_cast<double>(val.size());
  if (!imputer) return loss(forward_batch(net, val.inputs), val.targets) / m;
  const Eigen::MatrixXd d = impute_batch(*imputer, val.inputs, val.observed);
  Eigen::MatrixXd out(3 * val.landmark_count(), val.size());
  out << d, forward_batch(net, d);
  return joint_loss(out, val_joint_truth, val.landmark_count(), depth_weight) / m;
}

struct Slice {
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;
  Eigen::MatrixXd joint_truth;
  std::vector<std::vector<bool>> observed;
};

Slice take_columns(const Batch& batch, const Eigen::MatrixXd& joint, bool with_joint,
                   const std::vector<Eigen::Index>& cols) {
  Slice s;
  s.inputs = batch.inputs(Eigen::all, cols);
  s.targets = batch.targets(Eigen::all, cols);
  if (with_joint) s.joint_truth = joint(Eigen::all, cols);
  s.observed.reserve(cols.size());
  for (auto c : cols) s.observed.push_back(batch.observed[c]);
  return s;
}

Eigen::VectorXd quantize(Eigen::VectorXd v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = std::nearbyint(v[i] / kInputQuantum) * kInputQuantum;
  }
  return v;
}

}  // namespace

void validate(const TrainingConfig& config) {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::kInvalidConfig, what);
  };
  require(config.epochs >= 1, "epochs must be >= 1");
  require(config.max_iters_per_epoch >= 1, "max_iters_per_epoch must be >= 1");
  require(config.learning_rate > 0.0, "learning_rate must be positive");
  require(config.rmsprop_decay > 0.0 && config.rmsprop_decay < 1.0,
          "rmsprop_decay must lie in (0, 1)");
  require(config.rmsprop_epsilon > 0.0, "rmsprop_epsilon must be positive");
  require(config.patience >= 1, "patience must be >= 1");
  require(config.lr_decay_patience >= 1, "lr_decay_patience must be >= 1");
  require(config.lr_decay_factor > 0.0 && config.lr_decay_factor <= 1.0,
          "lr_decay_factor must lie in (0, 1]");
  require(config.min_learning_rate > 0.0, "min_learning_rate must be positive");
  require(config.missing_count >= 0, "missing_count must be >= 0");
  require(config.imputer_tau >= 1, "imputer_tau must be >= 1");
  require(config.depth_weight > 0.0, "depth_weight must be positive");
  require(config.batch_size >= 0, "batch_size must be >= 0 (0 = full batch)");
  require(config.validation_fraction > 0.0 && config.validation_fraction < 1.0,
          "validation_fraction must lie in (0, 1)");
  require(config.validation_factor >= 1, "validation_factor must be >= 1");
  require(config.hidden_layers >= 0, "hidden_layers must be >= 0");
  validate(config.augmentation);
}

std::pair<std::vector<Shape3D>, std::vector<Shape3D>> split_dataset(
    const std::vector<Shape3D>& dataset, double validation_fraction, std::uint64_t seed) {
  if (dataset.size() < 2) {
    fail(ErrorCode::kEmptyDataset, "need at least 2 shapes to split train/validation");
  }
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, {kSplitStream});
  std::shuffle(order.begin(), order.end(), rng);
  auto val_count = static_cast<std::size_t>(
      std::lround(validation_fraction * static_cast<double>(dataset.size())));
  val_count = std::clamp<std::size_t>(val_count, 1, dataset.size() - 1);
  std::pair<std::vector<Shape3D>, std::vector<Shape3D>> out;
  for (std::size_t k = 0; k < order.size(); ++k) {
    (k < val_count ? out.second : out.first).push_back(dataset[order[k]]);
  }
  return out;
}

TrainingResult train(const std::vector<Shape3D>& dataset, const TrainingConfig& config) {
  if (dataset.empty()) fail(ErrorCode::kEmptyDataset, "training dataset is empty");
  common_landmark_count(dataset);
  auto [train_shapes, val_shapes] =
      split_dataset(dataset, config.validation_fraction, config.seed);
  return train(train_shapes, val_shapes, config);
}

TrainingResult train(const std::vector<Shape3D>& train_shapes,
                     const std::vector<Shape3D>& validation_shapes,
                     const TrainingConfig& config) {
  validate(config);
  if (train_shapes.empty()) fail(ErrorCode::kEmptyDataset, "training split is empty");
  if (validation_shapes.empty()) fail(ErrorCode::kEmptyDataset, "validation split is empty");
  const Eigen::Index n = common_landmark_count(train_shapes);
  if (common_landmark_count(validation_shapes) != n) {
    fail(ErrorCode::kHeterogeneousLandmarkCount,
         "validation shapes have a different landmark count");
  }
  const bool joint = config.missing_count > 0;

  TrainingResult result;
  TrainedModel& model = result.model;
  TrainingHistory& history = result.history;
  model.n = n;
  model.config_hash = config_hash(config);
  const std::uint64_t init_seed = derive_seed(config.seed, {kInitStream});
  model.net = init_network(network_dims(n, config.hidden_layers), init_seed);
  if (joint) {
    model.imputer = init_imputer(n, linear_lambda(config.imputer_tau), init_seed);
  }

  Rng val_rng = make_rng(config.seed, {kValidationStream});
  Batch val = expand_validation(validation_shapes, config.validation_factor,
                                config.augmentation, val_rng, config.missing_count);
  history.clamped_targets += clamp_targets(val.targets);
  const Eigen::MatrixXd val_joint = joint ? joint_truth(val) : Eigen::MatrixXd();

  RmsPropConfig rms{config.learning_rate, config.rmsprop_decay, config.rmsprop_epsilon};
  RmsPropState net_state = make_rmsprop_state(model.net, rms);
  Eigen::MatrixXd imputer_ms;
  if (joint) imputer_ms = Eigen::MatrixXd::Zero(2 * n, 2 * n);

  TrainedModel best = model;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng rng = make_rng(config.seed, {kEpochStream, static_cast<std::uint64_t>(epoch)});
    Batch batch = make_epoch_batch(train_shapes, config.augmentation, rng, epoch == 1,
                                   config.missing_count);
    history.clamped_targets += clamp_targets(batch.targets);
    const Eigen::MatrixXd batch_joint = joint ? joint_truth(batch) : Eigen::MatrixXd();

    const Eigen::Index m = batch.size();
    const bool full = config.batch_size == 0 || config.batch_size >= m;
    std::vector<Eigen::Index> order(m);
    std::iota(order.begin(), order.end(), 0);
    if (!full) std::shuffle(order.begin(), order.end(), rng);
    Eigen::Index cursor = 0;

    EpochRecord record;
    record.epoch = epoch;
    record.learning_rate = rms.learning_rate;
    for (int it = 0; it < config.max_iters_per_epoch; ++it) {
      Slice slice;
      const Slice* use = nullptr;
      if (!full) {
        std::vector<Eigen::Index> cols(config.batch_size);
        for (auto& c : cols) {
          c = order[cursor];
          cursor = (cursor + 1) % m;
        }
        slice = take_columns(batch, batch_joint, joint, cols);
        use = &slice;
      }
      const Eigen::MatrixXd& inputs = use ? use->inputs : batch.inputs;
      const Eigen::Index count = inputs.cols();
      double batch_loss = 0.0;
      if (!joint) {
        const Eigen::MatrixXd& targets = use ? use->targets : batch.targets;
        NetworkParams grads = backward(model.net, inputs, targets, &batch_loss);
        rmsprop_step(model.net, grads, net_state);
      } else {
        const auto& observed = use ? use->observed : batch.observed;
        const Eigen::MatrixXd& truths = use ? use->joint_truth : batch_joint;
        JointGradients grads = joint_backward(*model.imputer, model.net, inputs, observed,
                                              truths, config.depth_weight, &batch_loss);
        rmsprop_step(model.net, grads.net, net_state);
        rmsprop_update(model.imputer->mutable_weights(), grads.imputer_weights, imputer_ms,
                       rms);
      }
      record.train_loss = batch_loss / static_cast<double>(count);
      record.iterations = it + 1;
    }

    record.validation_loss =
        validation_loss(model.net, model.imputer, val, val_joint, config.depth_weight);
    history.epochs.push_back(record);
    model.epochs_run = epoch;

    if (record.validation_loss < best_loss) {
      best_loss = record.validation_loss;
      best = model;
      best.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      history.stopped_early = true;
      break;
    } else if (since_best % config.lr_decay_patience == 0) {
      rms.learning_rate =
          std::max(config.min_learning_rate, rms.learning_rate * config.lr_decay_factor);
      net_state.config.learning_rate = rms.learning_rate;
    }
  }
  if (history.clamped_targets > 0) {
    std::cerr << "warning: clamped " << history.clamped_targets
              << " depth targets to +-" << kTargetLimit << "\n";
  }

  best.epochs_run = model.epochs_run;
  best.best_validation_error = best_loss;
  history.best_epoch = best.best_epoch;
  result.model = std::move(best);
  return result;
}

Shape3D reconstruct(const TrainedModel& model, const Landmarks2D& landmarks) {
  if (landmarks.size() != model.n) {
    fail(ErrorCode::kLandmarkCountMismatch,
         "model expects " + std::to_string(model.n) + " landmarks, got " +
             std::to_string(landmarks.size()));
  }
  const bool complete = landmarks.complete();
  if (!complete && !model.imputer) {
    fail(ErrorCode::kMissingWithoutImputer,
         "input has missing landmarks but the model has no imputer");
  }
  const Standardized2D standardized = standardize_2d(landmarks);
  Eigen::VectorXd d = quantize(build_input(standardized.landmarks));
  if (!complete) d = impute(*model.imputer, d, landmarks.observed());
  const Eigen::VectorXd depth = predict(model.net, d);
  return assemble_reconstruction(Landmarks2D(deinterleave(d)), depth);
}

EvalReport evaluate(const TrainedModel& model, const std::vector<Shape3D>& test_shapes,
                    const WeakPerspectiveCamera& camera, double noise_fraction,
                    int missing_count, Rng& rng) {
  if (test_shapes.empty()) fail(ErrorCode::kEmptyDataset, "test set is empty");
  std::vector<Landmarks2D> views;
  views.reserve(test_shapes.size());
  for (const auto& shape : test_shapes) {
    if (shape.size() != model.n) {
      fail(ErrorCode::kLandmarkCountMismatch,
           "model expects " + std::to_string(model.n) + " landmarks, test shape has " +
               std::to_string(shape.size()));
    }
    std::vector<bool> observed = sample_missing_mask(shape.size(), missing_count, rng);
    Landmarks2D view(project_weak_perspective(shape, camera).coords(), std::move(observed));
    views.push_back(add_landmark_noise(view, noise_fraction, rng));
  }

  std::vector<Shape3D> recons;
  recons.reserve(views.size());
  const auto start = std::chrono::steady_clock::now();
  for (const auto& view : views) recons.push_back(reconstruct(model, view));
  const auto stop = std::chrono::steady_clock::now();

  EvalReport report;
  report.per_landmark_mean_residuals = Eigen::VectorXd::Zero(model.n);
  for (std::size_t i = 0; i < recons.size(); ++i) {
    const ProcrustesResult aligned = procrustes_align(recons[i], test_shapes[i]);
    report.per_sample_errors.push_back(aligned.error);
    report.per_landmark_mean_residuals += aligned.residuals;
  }
  const double count = static_cast<double>(recons.size());
  report.per_landmark_mean_residuals /= count;
  report.mean_error =
      std::accumulate(report.per_sample_errors.begin(), report.per_sample_errors.end(), 0.0) /
      count;
  report.wall_time_seconds = std::chrono::duration<double>(stop - start).count();
  report.reconstructions_per_second =
      report.wall_time_seconds > 0.0 ? count / report.wall_time_seconds : 0.0;
  return report;
}

BenchResult bench_reconstruct(const TrainedModel& model, long repetitions, int missing_count,
                              std::uint64_t seed) {
  if (repetitions < 1) fail(ErrorCode::kInvalidConfig, "repetitions must be >= 1");
  Rng rng = make_rng(seed, {kBenchStream});
  const long distinct = std::min<long>(repetitions, 256);
  std::vector<Landmarks2D> views;
  views.reserve(distinct);
  for (long i = 0; i < distinct; ++i) {
    Eigen::Matrix2Xd coords(2, model.n);
    for (Eigen::Index k = 0; k < coords.size(); ++k) coords.data()[k] = uniform(rng, -100.0, 100.0);
    views.emplace_back(std::move(coords), sample_missing_mask(model.n, missing_count, rng));
  }
  double sink = 0.0;
  const auto start = std::chrono::steady_clock::now();
  for (long i = 0; i < repetitions; ++i) {
    sink += reconstruct(model, views[i % distinct]).coords()(2, 0);
  }
  const auto stop = std::chrono::steady_clock::now();
  if (!std::isfinite(sink)) fail(ErrorCode::kInvariantViolation, "non-finite reconstruction");
  BenchResult result;
  result.reconstructions = repetitions;
  result.wall_time_seconds = std::chrono::duration<double>(stop - start).count();
  result.reconstructions_per_second =
      result.wall_time_seconds > 0.0
          ? static_cast<double>(repetitions) / result.wall_time_seconds
          : 0.0;
  return result;
}

std::string format_report(const EvalReport& report, bool include_timing) {
  std::string out = "lift3d-eval-report 1\n";
  out += "samples " + std::to_string(report.per_sample_errors.size()) + "\n";
  out += "mean_error " + text::format_double(report.mean_error) + "\n";
  out += "per_landmark_mean_residual ";
  text::append_doubles(out, report.per_landmark_mean_residuals.data(),
                       static_cast<std::size_t>(report.per_landmark_mean_residuals.size()));
  out += "\n";
  for (std::size_t i = 0; i < report.per_sample_errors.size(); ++i) {
    out += "sample " + std::to_string(i) + " " +
           text::format_double(report.per_sample_errors[i]) + "\n";
  }
  if (include_timing) {
    out += "wall_time_seconds " + text::format_double(report.wall_time_seconds) + "\n";
    out += "reconstructions_per_second " +
           text::format_double(report.reconstructions_per_second) + "\n";
  }
  return out;
}

std::string format_history(const TrainingHistory& history, const TrainedModel& model) {
  std::string out = "lift3d-train-history 1\n";
  out += "epochs_run " + std::to_string(model.epochs_run) + "\n";
  out += "best_epoch " + std::to_string(history.best_epoch) + "\n";
  out += "best_validation_error " + text::format_double(model.best_validation_error) + "\n";
  out += std::string("stopped_early ") + (history.stopped_early ? "1" : "0") + "\n";
  out += "clamped_targets " + std::to_string(history.clamped_targets) + "\n";
  out += "# epoch iterations learning_rate train_loss validation_loss\n";
  for (const auto& e : history.epochs) {
    out += "epoch " + std::to_string(e.epoch) + " " + std::to_string(e.iterations) + " " +
           text::format_double(e.learning_rate) + " " + text::format_double(e.train_loss) + " " +
           text::format_double(e.validation_loss) + "\n";
  }
  return out;
}

}  // namespace lift3d
