// lift3d command line: synth, project, train, eval, reconstruct, bench.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lift3d/augment.hpp"
#include "lift3d/dataset.hpp"
#include "lift3d/error.hpp"
#include "lift3d/pipeline.hpp"
#include "lift3d/random.hpp"
#include "lift3d/synthetic.hpp"
#include "lift3d/text_io.hpp"

namespace {

using namespace lift3d;

constexpr int kUsageStatus = 2;

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    text::write_file(path, text);
  }
}

Interval pair_interval(const std::vector<double>& v, const char* name) {
  if (v.size() != 2) fail(ErrorCode::kInvalidSpec, std::string(name) + " takes two values");
  return {v[0], v[1]};
}

struct SynthArgs {
  std::string kind = "sheet";
  int n = 0;
  int samples = 100;
  std::uint64_t seed = 1;
  std::string out;
  std::optional<double> joint_angle_range;
  std::optional<double> heading_range;
  std::vector<double> amplitude, frequency, phase, twist, view;
  std::optional<double> aspect_jitter;
  std::optional<double> vertex_jitter;
  std::optional<double> yaw_range;
};

void run_synth(const SynthArgs& a) {
  SyntheticFamilySpec spec;
  spec.kind = parse_synthetic_kind(a.kind);
  if (a.n > 0) {
    spec.n = a.n;
  } else if (spec.kind == SyntheticKind::kChain) {
    spec.n = 15;
  } else if (spec.kind == SyntheticKind::kBox) {
    spec.n = 16;
  }
  spec.sample_count = a.samples;
  spec.seed = a.seed;
  if (a.joint_angle_range) spec.joint_angle_range = *a.joint_angle_range;
  if (a.heading_range) spec.heading_range = *a.heading_range;
  if (!a.amplitude.empty()) spec.amplitude = pair_interval(a.amplitude, "--amplitude");
  if (!a.frequency.empty()) spec.frequency = pair_interval(a.frequency, "--frequency");
  if (!a.phase.empty()) spec.phase = pair_interval(a.phase, "--phase");
  if (!a.twist.empty()) spec.twist = pair_interval(a.twist, "--twist");
  if (!a.view.empty()) {
    if (a.view.size() != 3) fail(ErrorCode::kInvalidSpec, "--view takes three angles");
    spec.view = {a.view[0], a.view[1], a.view[2]};
  }
  if (a.aspect_jitter) spec.aspect_jitter = *a.aspect_jitter;
  if (a.vertex_jitter) spec.vertex_jitter = *a.vertex_jitter;
  if (a.yaw_range) spec.yaw_range = *a.yaw_range;
  emit(serialize_dataset(generate_synthetic(spec)), a.out);
}

struct ProjectArgs {
  std::string data;
  int index = 0;
  double lambda = 1.0;
  double noise = 0.0;
  int missing = 0;
  std::uint64_t seed = 1;
  std::string out;
};

void run_project(const ProjectArgs& a) {
  const DatasetFile ds = load_dataset(a.data);
  if (a.index < 0 || a.index >= static_cast<int>(ds.samples.size())) {
    fail(ErrorCode::kInvalidSpec, "--index out of range");
  }
  const Shape3D& shape = ds.samples[a.index].shape;
  Rng rng = make_rng(a.seed, {0x70726f6a});
  auto observed = sample_missing_mask(shape.size(), a.missing, rng);
  Landmarks2D view(project_weak_perspective(shape, {a.lambda}).coords(), std::move(observed));
  emit(serialize_landmarks2d(add_landmark_noise(view, a.noise, rng)), a.out);
}

struct TrainArgs {
  std::string data;
  std::string val;
  std::string config;
  std::string out;
  std::string history;
  std::optional<int> epochs, iters, patience, missing, batch_size;
  std::optional<double> lr, noise;
  std::optional<std::uint64_t> seed;
  std::string preset;
};

void run_train(const TrainArgs& a) {
  TrainingConfig cfg;
  if (!a.config.empty()) cfg = config_from_json(text::read_file(a.config));
  if (a.preset == "face") {
    cfg.augmentation = face_preset();
  } else if (a.preset == "body") {
    cfg.augmentation = body_preset();
  } else if (!a.preset.empty()) {
    fail(ErrorCode::kInvalidConfig, "unknown --preset '" + a.preset + "'");
  }
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.iters) cfg.max_iters_per_epoch = *a.iters;
  if (a.patience) cfg.patience = *a.patience;
  if (a.missing) cfg.missing_count = *a.missing;
  if (a.batch_size) cfg.batch_size = *a.batch_size;
  if (a.lr) cfg.learning_rate = *a.lr;
  if (a.noise) cfg.augmentation.noise_fraction = *a.noise;
  if (a.seed) cfg.seed = *a.seed;
  validate(cfg);

  const DatasetFile ds = load_dataset(a.data);
  TrainingResult result;
  if (a.val.empty()) {
    result = train(ds.shapes(), cfg);
  } else {
    result = train(ds.shapes(), load_dataset(a.val).shapes(), cfg);
  }
  save_model(result.model, a.out);
  emit(format_history(result.history, result.model), a.history);
}

struct EvalArgs {
  std::string model;
  std::string data;
  double lambda = 1.0;
  double noise = 0.0;
  int missing = 0;
  std::uint64_t seed = 1;
  bool timing = false;
  std::string out;
};

void run_eval(const EvalArgs& a) {
  const TrainedModel model = load_model(a.model);
  const DatasetFile ds = load_dataset(a.data);
  Rng rng = make_rng(a.seed, {0x6576616c});
  const EvalReport report = evaluate(model, ds.shapes(), {a.lambda}, a.noise, a.missing, rng);
  emit(format_report(report, a.timing), a.out);
}

struct ReconstructArgs {
  std::string model;
  std::string input;
  std::string out;
  std::string mesh;
  std::vector<int> grid;
  std::uint64_t seed = 1;
};

void run_reconstruct(const ReconstructArgs& a) {
  const TrainedModel model = load_model(a.model);
  const Landmarks2D landmarks = load_landmarks2d(a.input);
  DatasetFile ds;
  ds.n = model.n;
  ds.unit = "scaled";
  ds.samples.push_back({"reconstruction", reconstruct(model, landmarks)});
  emit(serialize_dataset(ds), a.out);
  if (!a.mesh.empty()) {
    std::vector<std::vector<int>> faces;
    if (!a.grid.empty()) {
      if (a.grid.size() != 2 || a.grid[0] * a.grid[1] != model.n) {
        fail(ErrorCode::kInvalidSpec, "--grid needs rows cols with rows * cols = n");
      }
      faces = grid_faces(a.grid[0], a.grid[1]);
    }
    text::write_file(a.mesh, mesh_obj(ds.samples.front().shape, faces));
  }
}

struct BenchArgs {
  std::string model;
  int n = 0;
  long repetitions = 10000;
  int missing = 0;
  std::uint64_t seed = 1;
};

void run_bench(const BenchArgs& a) {
  TrainedModel model;
  if (!a.model.empty()) {
    model = load_model(a.model);
  } else {
    if (a.n < 3) fail(ErrorCode::kInvalidSpec, "bench needs --model or --n >= 3");
    model.n = a.n;
    model.net = init_network(a.n, derive_seed(a.seed, {1}));
    if (a.missing > 0) model.imputer = init_imputer(a.n, linear_lambda(3), derive_seed(a.seed, {1}));
  }
  const BenchResult r = bench_reconstruct(model, a.repetitions, a.missing, a.seed);
  std::cout << "lift3d-bench 1\n"
            << "n " << model.n << "\n"
            << "reconstructions " << r.reconstructions << "\n"
            << "wall_time_seconds " << text::format_double(r.wall_time_seconds) << "\n"
            << "reconstructions_per_second " << text::format_double(r.reconstructions_per_second)
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lift3d: 3D shape from 2D landmarks"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "generate a synthetic 3D dataset");
  s->add_option("--kind", synth.kind, "chain | sheet | box")->capture_default_str();
  s->add_option("--n", synth.n, "landmark count (sheet only, default 20)");
  s->add_option("--samples", synth.samples)->capture_default_str();
  s->add_option("--seed", synth.seed)->capture_default_str();
  s->add_option("--out,-o", synth.out, "output file (default stdout)");
  s->add_option("--joint-angle-range", synth.joint_angle_range, "chain, degrees");
  s->add_option("--heading-range", synth.heading_range, "chain, degrees");
  s->add_option("--amplitude", synth.amplitude, "sheet, lo hi radians")->expected(2);
  s->add_option("--frequency", synth.frequency, "sheet, lo hi")->expected(2);
  s->add_option("--phase", synth.phase, "sheet, lo hi radians")->expected(2);
  s->add_option("--twist", synth.twist, "sheet, lo hi")->expected(2);
  s->add_option("--view", synth.view, "sheet, rx ry rz degrees")->expected(3);
  s->add_option("--aspect-jitter", synth.aspect_jitter, "box");
  s->add_option("--vertex-jitter", synth.vertex_jitter, "box");
  s->add_option("--yaw-range", synth.yaw_range, "box, degrees");

  ProjectArgs project;
  auto* p = app.add_subcommand("project", "write one dataset sample as a 2D landmark file");
  p->add_option("--data,-d", project.data)->required();
  p->add_option("--index", project.index)->capture_default_str();
  p->add_option("--lambda", project.lambda, "camera scale")->capture_default_str();
  p->add_option("--noise", project.noise, "noise std / object size")->capture_default_str();
  p->add_option("--missing", project.missing, "landmarks to hide")->capture_default_str();
  p->add_option("--seed", project.seed)->capture_default_str();
  p->add_option("--out,-o", project.out);

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train a model on a 3D dataset");
  t->add_option("--data,-d", tr.data, "training dataset")->required();
  t->add_option("--val", tr.val, "validation dataset (default: split from --data)");
  t->add_option("--config,-c", tr.config, "JSON training config");
  t->add_option("--out,-o", tr.out, "checkpoint path")->required();
  t->add_option("--history", tr.history, "history report path (default stdout)");
  t->add_option("--preset", tr.preset, "rotation ranges: body | face");
  t->add_option("--epochs", tr.epochs);
  t->add_option("--iters", tr.iters, "max iterations per epoch");
  t->add_option("--patience", tr.patience);
  t->add_option("--missing", tr.missing, "landmarks hidden per sample; > 0 trains an imputer");
  t->add_option("--batch-size", tr.batch_size, "0 = full batch");
  t->add_option("--lr", tr.lr, "learning rate");
  t->add_option("--noise", tr.noise, "noise augmentation std / object size");
  t->add_option("--seed", tr.seed);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "score a checkpoint on a 3D dataset");
  e->add_option("--model,-m", ev.model)->required();
  e->add_option("--data,-d", ev.data)->required();
  e->add_option("--lambda", ev.lambda)->capture_default_str();
  e->add_option("--noise", ev.noise)->capture_default_str();
  e->add_option("--missing", ev.missing)->capture_default_str();
  e->add_option("--seed", ev.seed)->capture_default_str();
  e->add_flag("--timing", ev.timing, "add wall-time and throughput lines");
  e->add_option("--out,-o", ev.out);

  ReconstructArgs rc;
  auto* r = app.add_subcommand("reconstruct", "lift one 2D landmark file to 3D");
  r->add_option("--model,-m", rc.model)->required();
  r->add_option("--input,-i", rc.input)->required();
  r->add_option("--out,-o", rc.out);
  r->add_option("--mesh", rc.mesh, "also write a Wavefront OBJ");
  r->add_option("--grid", rc.grid, "rows cols: mesh faces over a landmark grid")->expected(2);
  r->add_option("--seed", rc.seed, "unused; accepted for uniformity");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "measure reconstructions per second");
  b->add_option("--model,-m", bench.model, "checkpoint (default: untrained net of size --n)");
  b->add_option("--n", bench.n);
  b->add_option("--repetitions", bench.repetitions)->capture_default_str();
  b->add_option("--missing", bench.missing)->capture_default_str();
  b->add_option("--seed", bench.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int status = app.exit(err);
    return status == 0 ? 0 : kUsageStatus;
  }

  try {
    if (*s) run_synth(synth);
    if (*p) run_project(project);
    if (*t) run_train(tr);
    if (*e) run_eval(ev);
    if (*r) run_reconstruct(rc);
    if (*b) run_bench(bench);
  } catch (const Error& err) {
    std::cerr << "error code=" << error_code_name(err.code()) << " " << err.what() << "\n";
    return error_exit_status(err.code());
  } catch (const std::exception& err) {
    std::cerr << "error code=INTERNAL " << err.what() << "\n";
    return 1;
  }
  return 0;
}
