#pragma once

// Synthetic point clouds shared by the unit and acceptance tests. Columns are
// points.

#include "smdim/rng.hpp"

#include <Eigen/Core>
#include <Eigen/QR>

#include <cmath>

namespace datasets {

/// Noise-free plane in 3-D whose long axis, along (1,1,1)/sqrt(3), has
/// `variance_ratio` times the variance of its short axis.
inline Eigen::MatrixXd stretched_plane(std::uint64_t seed, int n_points, double variance_ratio = 1e3,
                                       double scale = 5.0) {
  smdim::Rng rng(seed);
  const Eigen::Vector3d a = Eigen::Vector3d(1, 1, 1).normalized();
  const Eigen::Vector3d b = Eigen::Vector3d(1, -1, 0).normalized();
  const double stretch = std::sqrt(variance_ratio);
  Eigen::MatrixXd x(3, n_points);
  for (int i = 0; i < n_points; ++i) {
    const double u = rng.uniform(-1, 1), v = rng.uniform(-1, 1);
    x.col(i) = scale * (stretch * u * a + v * b);
  }
  return x;
}

/// Curved 2-D sheet in 3-D: a 270-degree arc of a unit circle swept along z.
inline Eigen::MatrixXd curved_sheet(std::uint64_t seed, int n_points, double scale = 1.0) {
  smdim::Rng rng(seed);
  constexpr double kHalfArc = 0.75 * 3.14159265358979323846;
  Eigen::MatrixXd x(3, n_points);
  for (int i = 0; i < n_points; ++i) {
    const double t = rng.uniform(-1, 1) * kHalfArc, h = rng.uniform(-1, 1) * 1.5;
    x.col(i) = scale * Eigen::Vector3d(std::sin(t), 1 - std::cos(t), h);
  }
  return x;
}

/// Rank-k data with equal spread along k random orthonormal directions of
/// R^n, coordinates uniform in [-spread, spread].
inline Eigen::MatrixXd isotropic_subspace(std::uint64_t seed, int n, int k, int n_points, double spread = 2.0) {
  smdim::Rng rng(seed);
  Eigen::MatrixXd g(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.uniform(-1, 1);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  Eigen::MatrixXd c(k, n_points);
  for (int j = 0; j < n_points; ++j)
    for (int i = 0; i < k; ++i) c(i, j) = rng.uniform(-spread, spread);
  return basis * c;
}

} // namespace datasets
