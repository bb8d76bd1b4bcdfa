#include "lift3d/synthetic.hpp"

#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "lift3d/error.hpp"
#include "lift3d/random.hpp"

namespace lift3d {

namespace {

constexpr int kChainLandmarks = 15;
constexpr int kBoxLandmarks = 16;

// Body joints, y up, facing +z. Offsets are from the parent joint in mm.
struct Joint {
  const char* name;
  int parent;
  Eigen::Vector3d offset;
};

const std::array<Joint, kChainLandmarks>& skeleton() {
  static const std::array<Joint, kChainLandmarks> joints = {{
      {"pelvis", -1, {0.0, 0.0, 0.0}},
      {"neck", 0, {0.0, 520.0, 0.0}},
      {"head", 1, {0.0, 220.0, 20.0}},
      {"l_shoulder", 1, {-180.0, -30.0, 0.0}},
      {"l_elbow", 3, {0.0, -290.0, 0.0}},
      {"l_wrist", 4, {0.0, -250.0, 0.0}},
      {"r_shoulder", 1, {180.0, -30.0, 0.0}},
      {"r_elbow", 6, {0.0, -290.0, 0.0}},
      {"r_wrist", 7, {0.0, -250.0, 0.0}},
      {"l_hip", 0, {-100.0, -60.0, 0.0}},
      {"l_knee", 9, {0.0, -420.0, 0.0}},
      {"l_ankle", 10, {0.0, -400.0, 0.0}},
      {"r_hip", 0, {100.0, -60.0, 0.0}},
      {"r_knee", 12, {0.0, -420.0, 0.0}},
      {"r_ankle", 13, {0.0, -400.0, 0.0}},
  }};
  return joints;
}

Eigen::Matrix3d yaw(double degrees) {
  return Eigen::AngleAxisd(degrees * std::numbers::pi / 180.0, Eigen::Vector3d::UnitY())
      .toRotationMatrix();
}

Shape3D chain_sample(const SyntheticFamilySpec& spec, Rng& rng) {
  const auto& joints = skeleton();
  const double range = spec.joint_angle_range;
  std::array<Eigen::Matrix3d, kChainLandmarks> global;
  Eigen::Matrix3Xd coords(3, kChainLandmarks);
  for (int j = 0; j < kChainLandmarks; ++j) {
    const Joint& joint = joints[j];
    Eigen::Matrix3d local;
    if (joint.parent < 0) {
      local = yaw(uniform(rng, -spec.heading_range, spec.heading_range));
    } else {
      local = rotation_matrix({uniform(rng, -range, range), uniform(rng, -range, range),
                               uniform(rng, -range, range)});
    }
    if (joint.parent < 0) {
      global[j] = local;
      coords.col(j) = joint.offset;
    } else {
      global[j] = global[joint.parent] * local;
      coords.col(j) = coords.col(joint.parent) + global[joint.parent] * joint.offset;
    }
  }
  return Shape3D(std::move(coords));
}

Shape3D sheet_sample(const SyntheticFamilySpec& spec, Rng& rng) {
  const auto [rows, cols] = sheet_grid(spec.n);
  const double amplitude = uniform(rng, spec.amplitude.lo, spec.amplitude.hi);
  const double frequency = uniform(rng, spec.frequency.lo, spec.frequency.hi);
  const double phase = uniform(rng, spec.phase.lo, spec.phase.hi);
  const double twist = amplitude * uniform(rng, spec.twist.lo, spec.twist.hi);

  // Integrate the bending angle along the strip so cell widths are preserved.
  const double step = 1.0 / (cols - 1);
  Eigen::VectorXd px(cols), pz(cols);
  px[0] = 0.0;
  pz[0] = 0.0;
  for (int k = 1; k < cols; ++k) {
    const double s_mid = (k - 0.5) * step;
    const double angle = amplitude * std::sin(std::numbers::pi * frequency * s_mid + phase);
    px[k] = px[k - 1] + step * std::cos(angle);
    pz[k] = pz[k - 1] + step * std::sin(angle);
  }
  const double height = (rows - 1) * step;

  Eigen::Matrix3Xd coords(3, spec.n);
  for (int r = 0; r < rows; ++r) {
    const double y = r * step;
    for (int k = 0; k < cols; ++k) {
      const double z = pz[k] + twist * px[k] * (y - 0.5 * height);
      coords.col(r * cols + k) = spec.width * Eigen::Vector3d(px[k], y, z);
    }
  }
  return Shape3D(rotation_matrix(spec.view) * coords);
}

Eigen::Matrix3Xd box_template() {
  Eigen::Matrix3Xd t(3, kBoxLandmarks);
  // x: length, y: up, z: width (m). Lower body then cabin.
  int k = 0;
  for (double x : {-2.25, 2.25}) {
    for (double y : {0.0, 0.8}) {
      for (double z : {-0.9, 0.9}) t.col(k++) = Eigen::Vector3d(x, y, z);
    }
  }
  for (double x : {-1.3, 0.9}) {
    for (double y : {0.8, 1.4}) {
      const double half = y > 1.0 ? 0.7 : 0.85;
      for (double z : {-half, half}) t.col(k++) = Eigen::Vector3d(x, y, z);
    }
  }
  return t;
}

Shape3D box_sample(const SyntheticFamilySpec& spec, Rng& rng) {
  Eigen::Matrix3Xd coords = box_template();
  const Eigen::Vector3d aspect(1.0 + uniform(rng, -spec.aspect_jitter, spec.aspect_jitter),
                               1.0 + uniform(rng, -spec.aspect_jitter, spec.aspect_jitter),
                               1.0 + uniform(rng, -spec.aspect_jitter, spec.aspect_jitter));
  coords = aspect.asDiagonal() * coords;
  const double length = 4.5;
  for (Eigen::Index i = 0; i < coords.size(); ++i) {
    coords.data()[i] += length * uniform(rng, -spec.vertex_jitter, spec.vertex_jitter);
  }
  // Camera slightly above the car.
  const Eigen::Matrix3d view = rotation_matrix({15.0, 0.0, 0.0});
  return Shape3D(view * yaw(uniform(rng, -spec.yaw_range, spec.yaw_range)) * coords);
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::kInvalidSpec, what);
}

void require_interval(const Interval& range, const std::string& name) {
  require(range.lo <= range.hi && std::isfinite(range.lo) && std::isfinite(range.hi),
          name + " must be an ordered finite interval");
}

}  // namespace

SyntheticKind parse_synthetic_kind(const std::string& name) {
  if (name == "chain") return SyntheticKind::kChain;
  if (name == "sheet") return SyntheticKind::kSheet;
  if (name == "box") return SyntheticKind::kBox;
  fail(ErrorCode::kInvalidSpec, "unknown synthetic family '" + name + "'");
}

std::string synthetic_kind_name(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kChain: return "chain";
    case SyntheticKind::kSheet: return "sheet";
    case SyntheticKind::kBox: return "box";
  }
  return "unknown";
}

std::pair<int, int> sheet_grid(int n) {
  int rows = 1;
  for (int c = 1; c * c <= n; ++c) {
    if (n % c == 0) rows = c;
  }
  if (rows < 2) {
    fail(ErrorCode::kInvalidSpec,
         "sheet needs n with a divisor >= 2 to form a grid, got " + std::to_string(n));
  }
  return {rows, n / rows};
}

void validate(const SyntheticFamilySpec& spec) {
  require(spec.sample_count >= 1, "sample_count must be >= 1");
  switch (spec.kind) {
    case SyntheticKind::kChain:
      require(spec.n == kChainLandmarks, "chain family has exactly 15 landmarks");
      require(spec.joint_angle_range >= 0.0 && spec.joint_angle_range <= 90.0,
              "joint_angle_range must lie in [0, 90]");
      require(spec.heading_range >= 0.0 && spec.heading_range <= 180.0,
              "heading_range must lie in [0, 180]");
      break;
    case SyntheticKind::kSheet:
      sheet_grid(spec.n);
      require(spec.width > 0.0, "width must be positive");
      require_interval(spec.amplitude, "amplitude");
      require_interval(spec.frequency, "frequency");
      require_interval(spec.phase, "phase");
      require_interval(spec.twist, "twist");
      require(std::abs(spec.amplitude.lo) <= 1.2 && std::abs(spec.amplitude.hi) <= 1.2,
              "amplitude must stay within 1.2 rad");
      break;
    case SyntheticKind::kBox:
      require(spec.n == kBoxLandmarks, "box family has exactly 16 landmarks");
      require(spec.aspect_jitter >= 0.0 && spec.aspect_jitter <= 0.3,
              "aspect_jitter must lie in [0, 0.3]");
      require(spec.vertex_jitter >= 0.0 && spec.vertex_jitter <= 0.05,
              "vertex_jitter must lie in [0, 0.05]");
      require(spec.yaw_range >= 0.0 && spec.yaw_range <= 180.0, "yaw_range must lie in [0, 180]");
      break;
  }
}

DatasetFile generate_synthetic(const SyntheticFamilySpec& spec) {
  validate(spec);
  DatasetFile ds;
  ds.n = spec.n;
  ds.unit = spec.kind == SyntheticKind::kBox ? "m" : "mm";
  const std::string prefix = synthetic_kind_name(spec.kind);
  for (int i = 0; i < spec.sample_count; ++i) {
    Rng rng = make_rng(spec.seed, {static_cast<std::uint64_t>(spec.kind),
                                   static_cast<std::uint64_t>(i)});
    Shape3D shape;
    switch (spec.kind) {
      case SyntheticKind::kChain: shape = chain_sample(spec, rng); break;
      case SyntheticKind::kSheet: shape = sheet_sample(spec, rng); break;
      case SyntheticKind::kBox: shape = box_sample(spec, rng); break;
    }
    ds.samples.push_back({prefix + "-" + std::to_string(i), std::move(shape)});
  }
  return ds;
}

}  // namespace lift3d
