#pragma once

#include <cstdint>
#include <string>

#include "lift3d/augment.hpp"
#include "lift3d/dataset.hpp"

namespace lift3d {

enum class SyntheticKind { kChain, kSheet, kBox };

SyntheticKind parse_synthetic_kind(const std::string& name);
std::string synthetic_kind_name(SyntheticKind kind);

// Stand-ins for real landmark databases:
//   chain - 15-joint articulated body (mm), random joint angles and heading
//   sheet - rows x cols grid of an inextensible strip bent by a sinusoidal
//           angle profile plus a proportional twist, seen from a fixed
//           oblique view. Zero amplitude gives a flat sheet.
//   box   - rigid two-box car template with aspect and vertex jitter, random
//           yaw
struct SyntheticFamilySpec {
  SyntheticKind kind = SyntheticKind::kSheet;
  int n = 20;
  int sample_count = 100;
  std::uint64_t seed = 1;

  // chain
  double joint_angle_range = 30.0;  // degrees, per joint and axis
  double heading_range = 180.0;     // degrees about the vertical axis

  // sheet
  double width = 386.0;             // mm
  Interval amplitude{0.1, 0.4};     // peak bending angle, radians
  Interval frequency{0.5, 1.5};     // half-waves across the width
  Interval phase{0.0, 0.5};         // radians
  Interval twist{-0.5, 0.5};        // relative to the amplitude
  EulerAngles view{10.0, -10.0, 0.0};

  // box
  double aspect_jitter = 0.05;   // relative, per axis
  double vertex_jitter = 0.01;   // fraction of length, per coordinate
  double yaw_range = 180.0;      // degrees
};

// Sheet grid layout (rows, cols) for n landmarks: rows is the largest divisor
// of n not above sqrt(n). Throws kInvalidSpec when that is 1.
std::pair<int, int> sheet_grid(int n);

// Throws kInvalidSpec on out-of-range parameters.
void validate(const SyntheticFamilySpec& spec);

DatasetFile generate_synthetic(const SyntheticFamilySpec& spec);

}  // namespace lift3d
