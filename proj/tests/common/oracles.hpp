#pragma once

// Independent reference implementations used to check the library. Plain
// arrays and loops only; nothing here calls into smdim numerics.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace oracle {

using V3 = std::array<double, 3>;
using M3 = std::array<std::array<double, 3>, 3>;

inline constexpr double kPi = 3.14159265358979323846;

inline M3 mul(const M3& a, const M3& b) {
  M3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline V3 apply(const M3& a, const V3& v) {
  V3 r{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r[i] += a[i][k] * v[k];
  return r;
}

inline V3 apply_transposed(const M3& a, const V3& v) {
  V3 r{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r[i] += a[k][i] * v[k];
  return r;
}

/// Rodrigues rotation about a unit axis, angle in degrees.
inline M3 axis_angle(const V3& u, double deg) {
  const double t = deg * kPi / 180.0, c = std::cos(t), s = std::sin(t), C = 1 - c;
  return {{{c + u[0] * u[0] * C, u[0] * u[1] * C - u[2] * s, u[0] * u[2] * C + u[1] * s},
           {u[1] * u[0] * C + u[2] * s, c + u[1] * u[1] * C, u[1] * u[2] * C - u[0] * s},
           {u[2] * u[0] * C - u[1] * s, u[2] * u[1] * C + u[0] * s, c + u[2] * u[2] * C}}};
}

/// tilt about z, then roll about y, then pitch about x (outermost first).
inline M3 rotation(double pitch, double roll, double tilt) {
  return mul(axis_angle({0, 0, 1}, tilt), mul(axis_angle({0, 1, 0}, roll), axis_angle({1, 0, 0}, pitch)));
}

/// Excitation of one cone, written out scalar by scalar for a single eye.
/// config = (head[3], left[3], right[3], az[ns], el[ns]), degrees.
inline double cone_excitation(const std::vector<double>& config, int eye, double cone_x, double cone_y,
                              const V3& eye_offset, double a, double radius, double focal) {
  const int ns = static_cast<int>(config.size() - 9) / 2;
  const M3 head = rotation(config[0], config[1], config[2]);
  const M3 local = rotation(config[3 + 3 * eye], config[4 + 3 * eye], config[5 + 3 * eye]);
  const M3 orient = mul(head, local);
  const V3 pos = apply(head, eye_offset);
  double s = 0.0;
  for (int k = 0; k < ns; ++k) {
    const double th = config[9 + k] * kPi / 180.0, ph = config[9 + ns + k] * kPi / 180.0;
    const V3 src{radius * std::cos(ph) * std::sin(th), radius * std::cos(ph) * std::cos(th), radius * std::sin(ph)};
    const V3 rel{src[0] - pos[0], src[1] - pos[1], src[2] - pos[2]};
    const V3 q = apply_transposed(orient, rel);
    if (q[1] <= 0.0) continue;
    const double px = -focal * q[0] / q[1], py = -focal * q[2] / q[1];
    const double d2 = (cone_x - px) * (cone_x - px) + (cone_y - py) * (cone_y - py);
    const double r2 = rel[0] * rel[0] + rel[1] * rel[1] + rel[2] * rel[2];
    s += a * std::exp(-d2) / r2;
  }
  return s;
}

/// CCA stress by direct summation over unordered pairs of column vectors.
/// Points are stored as points[i][coordinate].
inline double cca_stress(const std::vector<std::vector<double>>& in, const std::vector<std::vector<double>>& out,
                         double lambda, bool step) {
  double total = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i)
    for (std::size_t j = i + 1; j < in.size(); ++j) {
      double x = 0.0, y = 0.0;
      for (std::size_t k = 0; k < in[i].size(); ++k) x += (in[i][k] - in[j][k]) * (in[i][k] - in[j][k]);
      for (std::size_t k = 0; k < out[i].size(); ++k) y += (out[i][k] - out[j][k]) * (out[i][k] - out[j][k]);
      x = std::sqrt(x);
      y = std::sqrt(y);
      const double f = step ? (y <= lambda ? 1.0 : 0.0) : std::exp(-y / lambda);
      total += (x - y) * (x - y) * f;
    }
  return total;
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations,
/// sorted in decreasing order.
inline std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end(), [](double x, double y) { return x > y; });
  return ev;
}

} // namespace oracle
