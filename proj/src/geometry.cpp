#include "lift3d/geometry.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <string>

#include "lift3d/error.hpp"

namespace lift3d {

namespace {

constexpr double kDegenerateRelTol = 1e-12;

struct RowStats {
  double mean = 0.0;
  double stddev = 0.0;
  double max_abs = 0.0;
};

template <typename Row>
RowStats row_stats(const Row& row, const std::vector<bool>* observed) {
  RowStats out;
  double count = 0.0;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (observed && !(*observed)[j]) continue;
    out.mean += row[j];
    out.max_abs = std::max(out.max_abs, std::abs(row[j]));
    count += 1.0;
  }
  out.mean /= count;
  double ss = 0.0;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (observed && !(*observed)[j]) continue;
    const double d = row[j] - out.mean;
    ss += d * d;
  }
  out.stddev = std::sqrt(ss / count);
  return out;
}

double pooled_scale(const RowStats& x, const RowStats& y) {
  const double s = 0.5 * (x.stddev + y.stddev);
  const double magnitude = std::max(x.max_abs, y.max_abs);
  if (!(s > kDegenerateRelTol * magnitude) || s == 0.0) {
    fail(ErrorCode::kDegenerateShape,
         "x/y spread is zero; pooled scale " + std::to_string(s));
  }
  return s;
}

Standardized3D standardize_3d_impl(const Shape3D& shape,
                                   const std::vector<bool>* observed) {
  const auto& c = shape.coords();
  const RowStats x = row_stats(c.row(0), observed);
  const RowStats y = row_stats(c.row(1), observed);
  const RowStats z = row_stats(c.row(2), observed);
  const double s = pooled_scale(x, y);

  Eigen::Matrix3Xd out(3, c.cols());
  out.row(0) = (c.row(0).array() - x.mean) / s;
  out.row(1) = (c.row(1).array() - y.mean) / s;
  out.row(2) = (c.row(2).array() - z.mean) / s;
  return {Shape3D(std::move(out)), {x.mean, y.mean, z.mean, s}};
}

}  // namespace

Shape3D::Shape3D(Eigen::Matrix3Xd coords) : coords_(std::move(coords)) {
  if (coords_.cols() < 3) {
    fail(ErrorCode::kInvariantViolation,
         "shape needs at least 3 landmarks, got " +
             std::to_string(coords_.cols()));
  }
  if (!coords_.allFinite()) {
    fail(ErrorCode::kInvariantViolation, "shape has non-finite coordinates");
  }
}

Landmarks2D::Landmarks2D(Eigen::Matrix2Xd coords)
    : Landmarks2D(coords, std::vector<bool>(coords.cols(), true)) {}

Landmarks2D::Landmarks2D(Eigen::Matrix2Xd coords, std::vector<bool> observed)
    : coords_(std::move(coords)), observed_(std::move(observed)) {
  if (static_cast<Eigen::Index>(observed_.size()) != coords_.cols()) {
    fail(ErrorCode::kLengthMismatch, "mask length differs from landmark count");
  }
  if (coords_.cols() < 3) {
    fail(ErrorCode::kInvariantViolation,
         "landmarks need n >= 3, got " + std::to_string(coords_.cols()));
  }
  if (observed_count() < 3) {
    fail(ErrorCode::kInvariantViolation,
         "at least 3 landmarks must be observed, got " +
             std::to_string(observed_count()));
  }
  for (Eigen::Index j = 0; j < coords_.cols(); ++j) {
    if (observed_[j] && !coords_.col(j).allFinite()) {
      fail(ErrorCode::kInvariantViolation,
           "observed landmark " + std::to_string(j) + " is not finite");
    }
  }
}

Eigen::Index Landmarks2D::observed_count() const {
  Eigen::Index count = 0;
  for (bool b : observed_) count += b ? 1 : 0;
  return count;
}

Standardized3D standardize_3d(const Shape3D& shape) {
  return standardize_3d_impl(shape, nullptr);
}

Standardized3D standardize_3d(const Shape3D& shape,
                              const std::vector<bool>& observed) {
  if (static_cast<Eigen::Index>(observed.size()) != shape.size()) {
    fail(ErrorCode::kLengthMismatch, "mask length differs from landmark count");
  }
  return standardize_3d_impl(shape, &observed);
}

Standardized2D standardize_2d(const Landmarks2D& landmarks) {
  const auto& c = landmarks.coords();
  const auto& mask = landmarks.observed();
  const RowStats u = row_stats(c.row(0), &mask);
  const RowStats v = row_stats(c.row(1), &mask);
  const double s = pooled_scale(u, v);

  Eigen::Matrix2Xd out = Eigen::Matrix2Xd::Zero(2, c.cols());
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    if (!mask[j]) continue;
    out(0, j) = (c(0, j) - u.mean) / s;
    out(1, j) = (c(1, j) - v.mean) / s;
  }
  return {Landmarks2D(std::move(out), mask), {u.mean, v.mean, 0.0, s}};
}

Landmarks2D project_weak_perspective(const Shape3D& shape,
                                     const WeakPerspectiveCamera& camera) {
  if (!(camera.lambda > 0.0) || !std::isfinite(camera.lambda)) {
    fail(ErrorCode::kInvariantViolation, "camera lambda must be positive");
  }
  Eigen::Matrix2Xd uv = camera.lambda * shape.coords().topRows<2>();
  return Landmarks2D(std::move(uv));
}

Eigen::Matrix3d rotation_matrix(const EulerAngles& angles) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const Eigen::Matrix3d rx =
      Eigen::AngleAxisd(angles.rx * kDeg, Eigen::Vector3d::UnitX()).toRotationMatrix();
  const Eigen::Matrix3d ry =
      Eigen::AngleAxisd(angles.ry * kDeg, Eigen::Vector3d::UnitY()).toRotationMatrix();
  const Eigen::Matrix3d rz =
      Eigen::AngleAxisd(angles.rz * kDeg, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  return rz * ry * rx;
}

Shape3D rotate_shape(const Shape3D& shape, const EulerAngles& angles) {
  return Shape3D(rotation_matrix(angles) * shape.coords());
}

Shape3D assemble_reconstruction(const Landmarks2D& standardized_uv,
                                const Eigen::VectorXd& depth) {
  if (depth.size() != standardized_uv.size()) {
    fail(ErrorCode::kLengthMismatch,
         "depth has " + std::to_string(depth.size()) + " entries for " +
             std::to_string(standardized_uv.size()) + " landmarks");
  }
  if (!standardized_uv.complete()) {
    fail(ErrorCode::kInvariantViolation,
         "reconstruction needs every landmark present");
  }
  Eigen::Matrix3Xd out(3, depth.size());
  out.topRows<2>() = standardized_uv.coords();
  out.row(2) = depth.transpose();
  return Shape3D(std::move(out));
}

Eigen::VectorXd interleave(const Landmarks2D& landmarks) {
  const Eigen::Index n = landmarks.size();
  Eigen::VectorXd out(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const bool seen = landmarks.observed()[j];
    out[2 * j] = seen ? landmarks.coords()(0, j) : 0.0;
    out[2 * j + 1] = seen ? landmarks.coords()(1, j) : 0.0;
  }
  return out;
}

Eigen::VectorXd interleave_xy(const Shape3D& shape) {
  const Eigen::Index n = shape.size();
  Eigen::VectorXd out(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out[2 * j] = shape.coords()(0, j);
    out[2 * j + 1] = shape.coords()(1, j);
  }
  return out;
}

Eigen::Matrix2Xd deinterleave(const Eigen::VectorXd& uv) {
  if (uv.size() % 2 != 0) {
    fail(ErrorCode::kLengthMismatch, "interleaved vector has odd length");
  }
  return Eigen::Map<const Eigen::Matrix2Xd>(uv.data(), 2, uv.size() / 2);
}

ProcrustesResult procrustes_align(const Shape3D& recon, const Shape3D& truth) {
  if (recon.size() != truth.size()) {
    fail(ErrorCode::kLengthMismatch, "Procrustes shapes differ in landmark count");
  }
  const Eigen::Index n = truth.size();
  Eigen::Matrix3Xd x = recon.coords().colwise() - recon.coords().rowwise().mean();
  Eigen::Matrix3Xd y = truth.coords().colwise() - truth.coords().rowwise().mean();

  const double truth_spread = y.colwise().norm().mean();
  const double recon_norm2 = x.squaredNorm();
  if (!(truth_spread > 0.0) || !(recon_norm2 > 0.0)) {
    fail(ErrorCode::kDegenerateShape, "Procrustes input has zero spread");
  }
  y /= truth_spread;

  const Eigen::Matrix3d cross = y * x.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d d(1.0, 1.0, 1.0);
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) d[2] = -1.0;

  ProcrustesResult out;
  out.rotation = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
  out.scale = svd.singularValues().dot(d) / recon_norm2;
  const Eigen::Matrix3Xd aligned = out.scale * out.rotation * x;
  out.residuals = (aligned - y).colwise().norm().transpose();
  out.error = out.residuals.sum() / static_cast<double>(n);
  return out;
}

double procrustes_error(const Shape3D& recon, const Shape3D& truth) {
  return procrustes_align(recon, truth).error;
}

}  // namespace lift3d
