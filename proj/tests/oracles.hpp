#pragma once

// Straightforward reference implementations used to check the library.
// They share no code with src/.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// Plain-loop population statistics.
inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double population_std(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

inline std::vector<double> row(const Eigen::MatrixXd& m, int r) {
  std::vector<double> out;
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(r, j));
  return out;
}

// Mean removal per row and division by (sigma(row0) + sigma(row1)) / 2.
inline Eigen::MatrixXd standardize(const Eigen::MatrixXd& m) {
  const double s = 0.5 * (population_std(row(m, 0)) + population_std(row(m, 1)));
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double mu = mean(row(m, static_cast<int>(r)));
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(r, j) = (m(r, j) - mu) / s;
  }
  return out;
}

inline Eigen::Matrix3d rot_x(double deg) {
  const double a = deg * std::numbers::pi / 180.0;
  Eigen::Matrix3d r;
  r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return r;
}
inline Eigen::Matrix3d rot_y(double deg) {
  const double a = deg * std::numbers::pi / 180.0;
  Eigen::Matrix3d r;
  r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return r;
}
inline Eigen::Matrix3d rot_z(double deg) {
  const double a = deg * std::numbers::pi / 180.0;
  Eigen::Matrix3d r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

struct GridAlignment {
  double mean_distance = 0.0;
  double sum_squares = 0.0;
};

// Aligns recon to truth by exhaustive search over rotations (Euler grid,
// refined around the best cell) with the least-squares scale for each
// candidate. Truth is centered and scaled to unit mean centroid distance.
inline GridAlignment brute_force_procrustes(const Eigen::Matrix3Xd& recon,
                                            const Eigen::Matrix3Xd& truth) {
  const Eigen::Index n = truth.cols();
  Eigen::Matrix3Xd y = truth.colwise() - truth.rowwise().mean();
  double mean_norm = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) mean_norm += y.col(j).norm();
  y /= mean_norm / static_cast<double>(n);
  const Eigen::Matrix3Xd x = recon.colwise() - recon.rowwise().mean();

  auto score = [&](const Eigen::Matrix3d& r, GridAlignment* out) {
    const Eigen::Matrix3Xd rx = r * x;
    const double denom = rx.squaredNorm();
    const double scale = denom > 0.0 ? std::max(0.0, (rx.cwiseProduct(y)).sum() / denom) : 0.0;
    const Eigen::Matrix3Xd diff = scale * rx - y;
    if (out) {
      out->sum_squares = diff.squaredNorm();
      out->mean_distance = diff.colwise().norm().mean();
    }
    return diff.squaredNorm();
  };

  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_angles = Eigen::Vector3d::Zero();
  double step = 10.0;
  for (double a = -180.0; a < 180.0; a += step) {
    for (double b = -90.0; b <= 90.0; b += step) {
      for (double c = -180.0; c < 180.0; c += step) {
        const double v = score(rot_z(c) * rot_y(b) * rot_x(a), nullptr);
        if (v < best) {
          best = v;
          best_angles = {a, b, c};
        }
      }
    }
  }
  while (step > 1e-7) {
    const Eigen::Vector3d centre = best_angles;
    for (int i = -4; i <= 4; ++i) {
      for (int j = -4; j <= 4; ++j) {
        for (int k = -4; k <= 4; ++k) {
          const Eigen::Vector3d ang = centre + step / 4.0 * Eigen::Vector3d(i, j, k);
          const double v = score(rot_z(ang[2]) * rot_y(ang[1]) * rot_x(ang[0]), nullptr);
          if (v < best) {
            best = v;
            best_angles = ang;
          }
        }
      }
    }
    step /= 4.0;
  }
  GridAlignment result;
  score(rot_z(best_angles[2]) * rot_y(best_angles[1]) * rot_x(best_angles[0]), &result);
  return result;
}

// Central differences of f over every entry of `param`, restoring it after.
inline Eigen::MatrixXd finite_difference(Eigen::MatrixXd& param,
                                         const std::function<double()>& f,
                                         double h = 1e-5) {
  Eigen::MatrixXd g(param.rows(), param.cols());
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    const double keep = param.data()[i];
    param.data()[i] = keep + h;
    const double up = f();
    param.data()[i] = keep - h;
    const double down = f();
    param.data()[i] = keep;
    g.data()[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline Eigen::VectorXd finite_difference(Eigen::VectorXd& param, const std::function<double()>& f,
                                         double h = 1e-5) {
  Eigen::VectorXd g(param.size());
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    const double keep = param[i];
    param[i] = keep + h;
    const double up = f();
    param[i] = keep - h;
    const double down = f();
    param[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// max |a - b| / max(|a|, |b|, floor) over entries.
inline double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                             double floor = 1e-3) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a.data()[i]), std::abs(b.data()[i]), floor});
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]) / denom);
  }
  return worst;
}

inline Eigen::Matrix3Xd random_points(std::mt19937_64& rng, Eigen::Index n, double spread = 1.0) {
  std::normal_distribution<double> d(0.0, spread);
  Eigen::Matrix3Xd m(3, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
  return m;
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Eigen::Quaterniond q(d(rng), d(rng), d(rng), d(rng));
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace oracle
