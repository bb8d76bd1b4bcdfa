#include <string>

#include "lift3d/error.hpp"
#include "lift3d/pipeline.hpp"
#include "lift3d/text_io.hpp"

namespace lift3d {

namespace {

constexpr const char* kMagic = "lift3d-checkpoint";
constexpr long kVersion = 1;

void append_matrix(std::string& out, const char* row_tag, const Eigen::MatrixXd& m) {
  // Row-major on disk.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  for (Eigen::Index r = 0; r < rm.rows(); ++r) {
    out += row_tag;
    out += ' ';
    text::append_doubles(out, rm.row(r).data(), static_cast<std::size_t>(rm.cols()));
    out += '\n';
  }
}

Eigen::VectorXd read_values(text::LineReader& in, std::string_view tag, Eigen::Index count) {
  auto fields = in.next(tag);
  in.expect(fields, tag, static_cast<std::size_t>(count) + 1);
  Eigen::VectorXd v(count);
  for (Eigen::Index i = 0; i < count; ++i) v[i] = in.parse_double(fields[i + 1]);
  return v;
}

Eigen::MatrixXd read_matrix(text::LineReader& in, std::string_view tag, Eigen::Index rows,
                            Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = read_values(in, tag, cols).transpose();
  return m;
}

// Splits off and verifies the trailing checksum line; returns the body.
std::string_view verified_body(const std::string& text) {
  std::string_view all(text);
  if (all.empty() || all.back() != '\n') {
    fail(ErrorCode::kCorruptFile, "checkpoint is truncated (no trailing checksum line)");
  }
  const std::size_t line_start = all.rfind('\n', all.size() - 2);
  const std::size_t begin = line_start == std::string_view::npos ? 0 : line_start + 1;
  const auto fields = text::split_fields(all.substr(begin, all.size() - 1 - begin));
  if (fields.size() != 2 || fields[0] != "checksum") {
    fail(ErrorCode::kCorruptFile, "checkpoint is truncated (no trailing checksum line)");
  }
  const std::string_view body = all.substr(0, begin);
  if (text::hex64(text::fnv1a64(body)) != fields[1]) {
    fail(ErrorCode::kCorruptFile, "checkpoint checksum mismatch");
  }
  return body;
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
  std::string out;
  out += std::string(kMagic) + " " + std::to_string(kVersion) + "\n";
  out += "n " + std::to_string(model.n) + "\n";
  out += "input_ordering " + model.input_ordering + "\n";
  out += "dims " + std::to_string(model.net.dims.size());
  for (auto d : model.net.dims) out += " " + std::to_string(d);
  out += "\n";
  out += "config_hash " + text::hex64(model.config_hash) + "\n";
  out += "epochs_run " + std::to_string(model.epochs_run) + "\n";
  out += "best_epoch " + std::to_string(model.best_epoch) + "\n";
  out += "best_validation_error " + text::format_double(model.best_validation_error) + "\n";
  for (std::size_t l = 0; l < model.net.layers.size(); ++l) {
    const auto& layer = model.net.layers[l];
    out += "layer " + std::to_string(l) + " " + std::to_string(layer.weights.rows()) + " " +
           std::to_string(layer.weights.cols()) + "\n";
    append_matrix(out, "w", layer.weights);
    out += "b ";
    text::append_doubles(out, layer.bias.data(), static_cast<std::size_t>(layer.bias.size()));
    out += "\n";
  }
  if (model.imputer) {
    const auto& imp = *model.imputer;
    out += "imputer " + std::to_string(imp.tau()) + "\n";
    out += "lambda ";
    text::append_doubles(out, imp.lambda().data(), static_cast<std::size_t>(imp.tau()));
    out += "\n";
    out += "weights " + std::to_string(imp.weights().rows()) + " " +
           std::to_string(imp.weights().cols()) + "\n";
    append_matrix(out, "w", imp.weights());
  } else {
    out += "imputer 0\n";
  }
  out += "end\n";
  out += "checksum " + text::hex64(text::fnv1a64(out)) + "\n";
  return out;
}

TrainedModel deserialize_model(const std::string& text_in) {
  if (text_in.empty()) fail(ErrorCode::kCorruptFile, "checkpoint is empty");
  {
    text::LineReader head(text_in, "checkpoint");
    auto fields = head.next("header");
    if (fields.size() != 2 || fields[0] != kMagic) {
      fail(ErrorCode::kCorruptFile, "not a lift3d checkpoint");
    }
    if (head.parse_int(fields[1]) != kVersion) {
      fail(ErrorCode::kFormatVersionMismatch,
           "checkpoint version " + std::string(fields[1]) + ", expected " +
               std::to_string(kVersion));
    }
  }
  const std::string_view body = verified_body(text_in);
  text::LineReader in(body, "checkpoint");
  in.next("header");

  TrainedModel model;
  auto f = in.next("n");
  in.expect(f, "n", 2);
  model.n = in.parse_int(f[1]);
  f = in.next("input_ordering");
  in.expect(f, "input_ordering", 2);
  model.input_ordering = std::string(f[1]);
  if (model.input_ordering != kInterleavedOrdering) {
    in.error("unsupported input ordering '" + model.input_ordering + "'");
  }
  f = in.next("dims");
  in.expect(f, "dims");
  const long depth = f.size() > 1 ? in.parse_int(f[1]) : -1;
  if (depth < 2 || f.size() != static_cast<std::size_t>(depth) + 2) in.error("bad dims line");
  for (long k = 0; k < depth; ++k) model.net.dims.push_back(in.parse_int(f[k + 2]));
  if (model.net.dims.front() != 2 * model.n || model.net.dims.back() != model.n) {
    in.error("dims do not match n");
  }
  f = in.next("config_hash");
  in.expect(f, "config_hash", 2);
  model.config_hash = std::stoull(std::string(f[1]), nullptr, 16);
  f = in.next("epochs_run");
  in.expect(f, "epochs_run", 2);
  model.epochs_run = static_cast<int>(in.parse_int(f[1]));
  f = in.next("best_epoch");
  in.expect(f, "best_epoch", 2);
  model.best_epoch = static_cast<int>(in.parse_int(f[1]));
  f = in.next("best_validation_error");
  in.expect(f, "best_validation_error", 2);
  model.best_validation_error = in.parse_double(f[1]);

  for (long l = 0; l + 1 < depth; ++l) {
    f = in.next("layer");
    in.expect(f, "layer", 4);
    const Eigen::Index rows = in.parse_int(f[2]);
    const Eigen::Index cols = in.parse_int(f[3]);
    if (in.parse_int(f[1]) != l || rows != model.net.dims[l + 1] || cols != model.net.dims[l]) {
      in.error("layer header does not match dims");
    }
    DenseLayer layer;
    layer.weights = read_matrix(in, "w", rows, cols);
    layer.bias = read_values(in, "b", rows);
    model.net.layers.push_back(std::move(layer));
  }

  f = in.next("imputer");
  in.expect(f, "imputer", 2);
  const long tau = in.parse_int(f[1]);
  if (tau > 0) {
    Eigen::VectorXd lambda = read_values(in, "lambda", tau);
    f = in.next("weights");
    in.expect(f, "weights", 3);
    if (in.parse_int(f[1]) != 2 * model.n || in.parse_int(f[2]) != 2 * model.n) {
      in.error("imputer weights must be 2n x 2n");
    }
    Eigen::MatrixXd w = read_matrix(in, "w", 2 * model.n, 2 * model.n);
    model.imputer = ImputerParams(std::move(w), std::move(lambda));
  }
  f = in.next("end");
  in.expect(f, "end", 1);
  if (!in.at_end()) in.error("trailing content after 'end'");
  return model;
}

void save_model(const TrainedModel& model, const std::string& path) {
  text::write_file(path, serialize_model(model));
}

TrainedModel load_model(const std::string& path) {
  return deserialize_model(text::read_file(path));
}

}  // namespace lift3d
