#include "smdim/geometry.hpp"

#include <cmath>

namespace smdim {

Mat3 rotation_operator(const Vec3& angles_deg) {
  const double a = deg_to_rad(angles_deg[0]);
  const double b = deg_to_rad(angles_deg[1]);
  const double g = deg_to_rad(angles_deg[2]);
  const double ca = std::cos(a), sa = std::sin(a);
  const double cb = std::cos(b), sb = std::sin(b);
  const double cg = std::cos(g), sg = std::sin(g);

  Mat3 rx, ry, rz;
  rx << 1, 0, 0,
        0, ca, -sa,
        0, sa, ca;
  ry << cb, 0, sb,
        0, 1, 0,
        -sb, 0, cb;
  rz << cg, -sg, 0,
        sg, cg, 0,
        0, 0, 1;
  return rz * ry * rx;
}

Vec3 source_world_position(double azimuth_deg, double elevation_deg, double radius) {
  const double th = deg_to_rad(azimuth_deg);
  const double ph = deg_to_rad(elevation_deg);
  const double ce = std::cos(ph);
  return radius * Vec3(ce * std::sin(th), ce * std::cos(th), std::sin(ph));
}

std::optional<Vec2> project_source(const EyePose& eye, const Vec3& source, double focal) {
  const Vec3 local = eye.orientation.transpose() * (source - eye.position);
  const double depth = local.y();
  if (!(depth > 0.0)) return std::nullopt;
  return Vec2(-focal * local.x() / depth, -focal * local.z() / depth);
}

} // namespace smdim
