#pragma once

#include <Eigen/Core>

#include <vector>

namespace lift3d {

// 3 x n matrix of object landmarks, rows ordered (x; y; z).
class Shape3D {
 public:
  Shape3D() = default;
  // Throws kInvariantViolation unless n >= 3 and every entry is finite.
  explicit Shape3D(Eigen::Matrix3Xd coords);

  const Eigen::Matrix3Xd& coords() const { return coords_; }
  Eigen::Index size() const { return coords_.cols(); }

 private:
  Eigen::Matrix3Xd coords_;
};

// 2 x n matrix of image landmarks plus an observed flag per landmark.
// Coordinates of missing landmarks are ignored and may hold anything.
class Landmarks2D {
 public:
  Landmarks2D() = default;
  // All landmarks observed.
  explicit Landmarks2D(Eigen::Matrix2Xd coords);
  // Throws kInvariantViolation unless n >= 3, at least 3 landmarks are
  // observed and every observed entry is finite.
  Landmarks2D(Eigen::Matrix2Xd coords, std::vector<bool> observed);

  const Eigen::Matrix2Xd& coords() const { return coords_; }
  const std::vector<bool>& observed() const { return observed_; }
  Eigen::Index size() const { return coords_.cols(); }
  Eigen::Index observed_count() const;
  bool complete() const { return observed_count() == size(); }

 private:
  Eigen::Matrix2Xd coords_;
  std::vector<bool> observed_;
};

// Per-row means and the pooled scale (sigma(x) + sigma(y)) / 2 that were
// removed by standardization. mean_z is zero for 2D data.
struct StandardizationStats {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double mean_z = 0.0;
  double scale = 1.0;
};

struct WeakPerspectiveCamera {
  double lambda = 1.0;
};

// Degrees; applied as Rz * Ry * Rx (x first).
struct EulerAngles {
  double rx = 0.0;
  double ry = 0.0;
  double rz = 0.0;
};

struct Standardized3D {
  Shape3D shape;
  StandardizationStats stats;
};

struct Standardized2D {
  Landmarks2D landmarks;
  StandardizationStats stats;
};

// Centers each row by its own mean and divides all three rows by the pooled
// x/y scale. Uses the population standard deviation.
Standardized3D standardize_3d(const Shape3D& shape);

// Same, but means and scale are computed over the landmarks flagged observed
// only. All landmarks (observed or not) are transformed with those stats, so
// the result lives in the frame seen by standardize_2d on the observed subset.
Standardized3D standardize_3d(const Shape3D& shape,
                              const std::vector<bool>& observed);

// Statistics over observed landmarks only; missing entries come back as 0
// and stay flagged.
Standardized2D standardize_2d(const Landmarks2D& landmarks);

Landmarks2D project_weak_perspective(const Shape3D& shape,
                                     const WeakPerspectiveCamera& camera);

Eigen::Matrix3d rotation_matrix(const EulerAngles& angles);

Shape3D rotate_shape(const Shape3D& shape, const EulerAngles& angles);

// Stacks (u; v; depth). The result is only defined up to scale.
Shape3D assemble_reconstruction(const Landmarks2D& standardized_uv,
                                const Eigen::VectorXd& depth);

// (u1, v1, u2, v2, ...). Missing landmarks are written as zeros.
Eigen::VectorXd interleave(const Landmarks2D& landmarks);
Eigen::VectorXd interleave_xy(const Shape3D& shape);
Eigen::Matrix2Xd deinterleave(const Eigen::VectorXd& uv);

struct ProcrustesResult {
  double error = 0.0;          // mean per-landmark distance after alignment
  Eigen::VectorXd residuals;   // per-landmark distance after alignment
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  double scale = 1.0;
};

// Aligns recon onto truth with a proper rotation and uniform scale after
// centering both and normalizing truth to unit mean landmark distance from
// its centroid.
ProcrustesResult procrustes_align(const Shape3D& recon, const Shape3D& truth);

double procrustes_error(const Shape3D& recon, const Shape3D& truth);

}  // namespace lift3d
