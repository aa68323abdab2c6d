#pragma once

#include "smdim/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace smdim {

struct SystemSpec {
  int n_sources = 3;
  int cones_per_eye = 20;
  double cone_sensitivity = 1e-3;
  double sphere_radius = 100.0;                       // cm
  std::array<Vec3, 2> eye_offsets{Vec3(-5.0, 5.0, 5.0), Vec3(5.0, 5.0, 5.0)};  // cm
  double retina_focal = 1.0;                          // cm
  double cone_box_halfwidth = 1.0;                    // cm
  /// Half-angle of the cone around the resting gaze in which reference source
  /// positions are drawn.
  double source_cone_halfangle = 30.0;                // deg
  std::uint64_t seed = 0;

  /// Throws ValidationError naming the first invalid field.
  void validate() const;
};

enum class ExplorationMode { AgentOnly, EnvironmentOnly, Both };

std::string_view to_string(ExplorationMode mode);
/// Accepts "agent", "env", "both" as well as the enumerator names.
ExplorationMode parse_mode(std::string_view text);

/// Configuration vector, in degrees, laid out as
/// (head[3], left eye[3], right eye[3], azimuths[n_s], elevations[n_s]).
class Configuration {
public:
  static constexpr int kAgentDof = 9;

  Configuration() = default;
  explicit Configuration(int n_sources) : values_(Eigen::VectorXd::Zero(kAgentDof + 2 * n_sources)) {}
  explicit Configuration(Eigen::VectorXd values);

  static constexpr int length_for(int n_sources) noexcept { return kAgentDof + 2 * n_sources; }

  int n_sources() const noexcept { return static_cast<int>((values_.size() - kAgentDof) / 2); }
  Eigen::Index size() const noexcept { return values_.size(); }

  Vec3 head() const { return values_.segment<3>(0); }
  Vec3 left_eye() const { return values_.segment<3>(3); }
  Vec3 right_eye() const { return values_.segment<3>(6); }
  Vec3 eye(int which) const { return values_.segment<3>(3 + 3 * which); }
  double azimuth(int k) const { return values_[kAgentDof + k]; }
  double elevation(int k) const { return values_[kAgentDof + n_sources() + k]; }

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::VectorXd& values() noexcept { return values_; }
  double operator[](Eigen::Index i) const { return values_[i]; }
  double& operator[](Eigen::Index i) { return values_[i]; }

  bool operator==(const Configuration& other) const { return values_ == other.values_; }

private:
  Eigen::VectorXd values_;
};

/// Indices of the configuration entries a mode lets move.
std::vector<int> free_parameters(ExplorationMode mode, int n_sources);

/// Immutable agent/environment description.
class System {
public:
  System(SystemSpec spec, std::array<std::vector<Vec2>, 2> cones, Configuration reference);

  const SystemSpec& spec() const noexcept { return spec_; }
  const std::vector<Vec2>& cones(int eye) const { return cones_[eye]; }
  const std::array<std::vector<Vec2>, 2>& cones() const noexcept { return cones_; }
  const Configuration& reference() const noexcept { return reference_; }

  /// Sensory dimension n.
  int sensory_dim() const noexcept { return 2 * spec_.cones_per_eye; }
  int config_length() const noexcept { return Configuration::length_for(spec_.n_sources); }

  /// Pinhole poses of both eyes under `config`.
  std::array<EyePose, 2> eye_poses(const Configuration& config) const;
  std::vector<Vec3> source_positions(const Configuration& config) const;

private:
  SystemSpec spec_;
  std::array<std::vector<Vec2>, 2> cones_;
  Configuration reference_;
};

/// Draws cone layouts and the reference configuration from `spec.seed`.
System build_system(const SystemSpec& spec);

/// Excitations of the cones of one retina:
/// s_i = sum_k a exp(-|cone_i - proj_k|^2) / |eye - source_k|^2,
/// over the sources that project (positive depth).
Eigen::VectorXd retina_response(std::span<const Vec2> cones, const EyePose& eye,
                                std::span<const Vec3> sources, double sensitivity, double focal);

/// Sensory vector (left eye cones, then right eye cones).
Eigen::VectorXd sense(const System& system, const Configuration& config);

/// N configurations around the reference: free entries get an i.i.d. uniform
/// offset in [-amplitude, amplitude] degrees, frozen entries are copied.
std::vector<Configuration> sample_configurations(const System& system, ExplorationMode mode,
                                                 double amplitude_deg, int count,
                                                 std::uint64_t seed);

/// Offsets of the free parameters, dof x N, in degrees.
Eigen::MatrixXd configuration_offsets(const System& system, ExplorationMode mode,
                                      std::span<const Configuration> configs);

/// Inverse of configuration_offsets.
std::vector<Configuration> configurations_from_offsets(const System& system, ExplorationMode mode,
                                                       const Eigen::MatrixXd& offsets);

/// n x N matrix whose column i is sense(C_i) - sense(C_0).
Eigen::MatrixXd raw_variations(const System& system, std::span<const Configuration> configs);

struct Preprocessing {
  Eigen::VectorXd row_mean;
  Eigen::VectorXd row_scale;  ///< 1 where the row had (near) zero deviation
};

/// Sensory variation matrix, rows centred and reduced over the N samples.
struct VariationMatrix {
  Eigen::MatrixXd data;
  ExplorationMode mode = ExplorationMode::Both;
  double amplitude = 0.0;  ///< deg
  Preprocessing preprocessing;

  Eigen::Index sensory_dim() const noexcept { return data.rows(); }
  Eigen::Index samples() const noexcept { return data.cols(); }
};

/// Rows with standard deviation below this are centred but not scaled.
inline constexpr double kZeroDeviation = 1e-30;

/// Subtracts each row's mean and divides by its sample standard deviation.
VariationMatrix center_and_reduce(Eigen::MatrixXd raw, ExplorationMode mode = ExplorationMode::Both,
                                  double amplitude_deg = 0.0);

VariationMatrix explore(const System& system, std::span<const Configuration> configs,
                        ExplorationMode mode, double amplitude_deg);

} // namespace smdim
