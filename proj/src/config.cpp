#include <json.hpp>

#include <set>
#include <string>

#include "lift3d/error.hpp"
#include "lift3d/pipeline.hpp"
#include "lift3d/text_io.hpp"

namespace lift3d {

namespace {

using nlohmann::json;

json interval_json(const Interval& range) { return json::array({range.lo, range.hi}); }

Interval interval_from(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(ErrorCode::kInvalidConfig, std::string(key) + " must be a [lo, hi] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      fail(ErrorCode::kInvalidConfig,
           std::string("unknown key '") + it.key() + "' in " + where);
    }
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidConfig, std::string("bad value for '") + key + "': " + e.what());
  }
}

json augmentation_json(const AugmentationConfig& a) {
  return json{{"rx_range", interval_json(a.rx)},
              {"ry_range", interval_json(a.ry)},
              {"rz_range", interval_json(a.rz)},
              {"noise_fraction", a.noise_fraction},
              {"camera_lambda_range", interval_json(a.camera_lambda)},
              {"per_shape_rotation", a.per_shape_rotation}};
}

AugmentationConfig augmentation_from(const json& j) {
  if (!j.is_object()) fail(ErrorCode::kInvalidConfig, "augmentation must be an object");
  reject_unknown(j,
                 {"rx_range", "ry_range", "rz_range", "noise_fraction", "camera_lambda_range",
                  "per_shape_rotation"},
                 "augmentation");
  AugmentationConfig a;
  if (j.contains("rx_range")) a.rx = interval_from(j["rx_range"], "rx_range");
  if (j.contains("ry_range")) a.ry = interval_from(j["ry_range"], "ry_range");
  if (j.contains("rz_range")) a.rz = interval_from(j["rz_range"], "rz_range");
  if (j.contains("camera_lambda_range")) {
    a.camera_lambda = interval_from(j["camera_lambda_range"], "camera_lambda_range");
  }
  read_field(j, "noise_fraction", a.noise_fraction);
  read_field(j, "per_shape_rotation", a.per_shape_rotation);
  return a;
}

}  // namespace

std::string config_to_json(const TrainingConfig& c) {
  json j{{"epochs", c.epochs},
         {"max_iters_per_epoch", c.max_iters_per_epoch},
         {"learning_rate", c.learning_rate},
         {"rmsprop_decay", c.rmsprop_decay},
         {"rmsprop_epsilon", c.rmsprop_epsilon},
         {"patience", c.patience},
         {"lr_decay_patience", c.lr_decay_patience},
         {"lr_decay_factor", c.lr_decay_factor},
         {"min_learning_rate", c.min_learning_rate},
         {"augmentation", augmentation_json(c.augmentation)},
         {"missing_count", c.missing_count},
         {"imputer_tau", c.imputer_tau},
         {"depth_weight", c.depth_weight},
         {"seed", c.seed},
         {"batch_size", c.batch_size},
         {"validation_fraction", c.validation_fraction},
         {"validation_factor", c.validation_factor},
         {"hidden_layers", c.hidden_layers}};
  return j.dump(2);
}

TrainingConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParseError, std::string("config: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kInvalidConfig, "config must be a JSON object");
  reject_unknown(j,
                 {"epochs", "max_iters_per_epoch", "learning_rate", "rmsprop_decay",
                  "rmsprop_epsilon", "patience", "lr_decay_patience", "lr_decay_factor",
                  "min_learning_rate", "augmentation", "missing_count", "imputer_tau",
                  "depth_weight", "seed", "batch_size", "validation_fraction",
                  "validation_factor", "hidden_layers"},
                 "config");
  TrainingConfig c;
  read_field(j, "epochs", c.epochs);
  read_field(j, "max_iters_per_epoch", c.max_iters_per_epoch);
  read_field(j, "learning_rate", c.learning_rate);
  read_field(j, "rmsprop_decay", c.rmsprop_decay);
  read_field(j, "rmsprop_epsilon", c.rmsprop_epsilon);
  read_field(j, "patience", c.patience);
  read_field(j, "lr_decay_patience", c.lr_decay_patience);
  read_field(j, "lr_decay_factor", c.lr_decay_factor);
  read_field(j, "min_learning_rate", c.min_learning_rate);
  if (j.contains("augmentation")) c.augmentation = augmentation_from(j["augmentation"]);
  read_field(j, "missing_count", c.missing_count);
  read_field(j, "imputer_tau", c.imputer_tau);
  read_field(j, "depth_weight", c.depth_weight);
  read_field(j, "seed", c.seed);
  read_field(j, "batch_size", c.batch_size);
  read_field(j, "validation_fraction", c.validation_fraction);
  read_field(j, "validation_factor", c.validation_factor);
  read_field(j, "hidden_layers", c.hidden_layers);
  validate(c);
  return c;
}

std::uint64_t config_hash(const TrainingConfig& config) {
  return text::fnv1a64(config_to_json(config));
}

}  // namespace lift3d
