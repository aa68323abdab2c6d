#pragma once

#include <Eigen/Core>

#include <optional>

namespace smdim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg_to_rad(double deg) noexcept { return deg * (kPi / 180.0); }
constexpr double rad_to_deg(double rad) noexcept { return rad * (180.0 / kPi); }

// World frame: origin at the head centre, +x towards the right eye, +y
// forward (the resting gaze direction), +z up.
//
// Rotation angles are (pitch, roll, tilt) = (alpha, beta, gamma) about the x,
// y and z axes respectively, composed as R = Rz(tilt) * Ry(roll) * Rx(pitch).
inline constexpr const char* kRotationConvention = "Rz(tilt)*Ry(roll)*Rx(pitch)";

/// Proper rotation for (pitch, roll, tilt) given in degrees.
Mat3 rotation_operator(const Vec3& angles_deg);

/// Point on the sphere of `radius` centred on the head. Azimuth is measured
/// from the sagittal (y-z) plane towards +x, elevation from the transverse
/// (x-y) plane towards +z. (0, 0) maps to +y.
Vec3 source_world_position(double azimuth_deg, double elevation_deg, double radius);

/// Position of a pinhole and the orientation of its eye frame. The eye frame
/// looks along its own +y axis; retina coordinates run along its x and z axes.
struct EyePose {
  Vec3 position = Vec3::Zero();
  Mat3 orientation = Mat3::Identity();
};

/// Image of `source` on the retina sitting `focal` behind the pinhole, in
/// retina coordinates. The pinhole inverts the image. Empty when the source is
/// at nonpositive depth in the eye frame.
std::optional<Vec2> project_source(const EyePose& eye, const Vec3& source, double focal);

} // namespace smdim
