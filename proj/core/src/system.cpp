#include "smdim/system.hpp"

#include "smdim/error.hpp"
#include "smdim/rng.hpp"

#include <cmath>
#include <string>

namespace smdim {

void SystemSpec::validate() const {
  if (n_sources < 1) throw ValidationError("n_sources", "must be >= 1");
  if (cones_per_eye < 1) throw ValidationError("cones_per_eye", "must be >= 1");
  if (!(cone_sensitivity > 0.0)) throw ValidationError("cone_sensitivity", "must be > 0");
  if (!(sphere_radius > 0.0)) throw ValidationError("sphere_radius", "must be > 0");
  if (!(retina_focal > 0.0)) throw ValidationError("retina_focal", "must be > 0");
  if (!(cone_box_halfwidth > 0.0)) throw ValidationError("cone_box_halfwidth", "must be > 0");
  if (!(source_cone_halfangle >= 0.0 && source_cone_halfangle < 90.0))
    throw ValidationError("source_cone_halfangle", "must lie in [0, 90)");
  for (const auto& e : eye_offsets)
    if (!e.allFinite()) throw ValidationError("eye_offsets", "must be finite");
}

std::string_view to_string(ExplorationMode mode) {
  switch (mode) {
  case ExplorationMode::AgentOnly: return "agent";
  case ExplorationMode::EnvironmentOnly: return "env";
  case ExplorationMode::Both: return "both";
  }
  return "?";
}

ExplorationMode parse_mode(std::string_view text) {
  if (text == "agent" || text == "AgentOnly" || text == "m") return ExplorationMode::AgentOnly;
  if (text == "env" || text == "EnvironmentOnly" || text == "e") return ExplorationMode::EnvironmentOnly;
  if (text == "both" || text == "Both" || text == "b") return ExplorationMode::Both;
  throw ValidationError("mode", "unknown exploration mode '" + std::string(text) + "'");
}

Configuration::Configuration(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() < kAgentDof + 2 || (values_.size() - kAgentDof) % 2 != 0)
    throw ValidationError("configuration", "length must be 9 + 2 * n_sources");
}

std::vector<int> free_parameters(ExplorationMode mode, int n_sources) {
  const int total = Configuration::length_for(n_sources);
  int first = 0, last = total;
  if (mode == ExplorationMode::AgentOnly) last = Configuration::kAgentDof;
  if (mode == ExplorationMode::EnvironmentOnly) first = Configuration::kAgentDof;
  std::vector<int> idx;
  idx.reserve(last - first);
  for (int i = first; i < last; ++i) idx.push_back(i);
  return idx;
}

System::System(SystemSpec spec, std::array<std::vector<Vec2>, 2> cones, Configuration reference)
    : spec_(std::move(spec)), cones_(std::move(cones)), reference_(std::move(reference)) {
  spec_.validate();
  for (const auto& eye : cones_) {
    if (static_cast<int>(eye.size()) != spec_.cones_per_eye)
      throw ValidationError("cone_positions", "count must equal cones_per_eye");
    for (const auto& c : eye)
      if (c.cwiseAbs().maxCoeff() > spec_.cone_box_halfwidth)
        throw ValidationError("cone_positions", "cone outside the retina square");
  }
  if (reference_.size() != config_length())
    throw ValidationError("reference_config", "length does not match n_sources");
}

std::array<EyePose, 2> System::eye_poses(const Configuration& config) const {
  const Mat3 head = rotation_operator(config.head());
  std::array<EyePose, 2> poses;
  for (int e = 0; e < 2; ++e) {
    poses[e].position = head * spec_.eye_offsets[e];
    poses[e].orientation = head * rotation_operator(config.eye(e));
  }
  return poses;
}

std::vector<Vec3> System::source_positions(const Configuration& config) const {
  std::vector<Vec3> out;
  out.reserve(config.n_sources());
  for (int k = 0; k < config.n_sources(); ++k)
    out.push_back(source_world_position(config.azimuth(k), config.elevation(k), spec_.sphere_radius));
  return out;
}

System build_system(const SystemSpec& spec) {
  spec.validate();

  Rng cone_rng(derive_seed(spec.seed, "cones"));
  std::array<std::vector<Vec2>, 2> cones;
  const double w = spec.cone_box_halfwidth;
  for (auto& eye : cones) {
    eye.reserve(spec.cones_per_eye);
    for (int i = 0; i < spec.cones_per_eye; ++i) {
      const double x = cone_rng.uniform(-w, w);
      const double y = cone_rng.uniform(-w, w);
      eye.emplace_back(x, y);
    }
  }

  // Reference sources: uniform over the spherical cap around the resting gaze.
  Rng ref_rng(derive_seed(spec.seed, "reference"));
  Configuration ref(spec.n_sources);
  const double cos_max = std::cos(deg_to_rad(spec.source_cone_halfangle));
  for (int k = 0; k < spec.n_sources; ++k) {
    const double cos_a = 1.0 - ref_rng.uniform() * (1.0 - cos_max);
    const double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));
    const double psi = ref_rng.uniform(0.0, 2.0 * kPi);
    const Vec3 dir(sin_a * std::cos(psi), cos_a, sin_a * std::sin(psi));
    ref[Configuration::kAgentDof + k] = rad_to_deg(std::atan2(dir.x(), dir.y()));
    ref[Configuration::kAgentDof + spec.n_sources + k] = rad_to_deg(std::asin(dir.z()));
  }
  return System(spec, std::move(cones), std::move(ref));
}

Eigen::VectorXd retina_response(std::span<const Vec2> cones, const EyePose& eye,
                                std::span<const Vec3> sources, double sensitivity, double focal) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cones.size()));
  for (const auto& src : sources) {
    const auto proj = project_source(eye, src, focal);
    if (!proj) continue;
    const double gain = sensitivity / (src - eye.position).squaredNorm();
    for (std::size_t i = 0; i < cones.size(); ++i)
      s[static_cast<Eigen::Index>(i)] += gain * std::exp(-(cones[i] - *proj).squaredNorm());
  }
  return s;
}

Eigen::VectorXd sense(const System& system, const Configuration& config) {
  if (config.size() != system.config_length())
    throw ValidationError("config", "length " + std::to_string(config.size()) + " does not match system (" +
                                        std::to_string(system.config_length()) + ")");
  const auto poses = system.eye_poses(config);
  const auto sources = system.source_positions(config);
  const int c = system.spec().cones_per_eye;
  Eigen::VectorXd s(2 * c);
  for (int e = 0; e < 2; ++e)
    s.segment(e * c, c) = retina_response(system.cones(e), poses[e], sources,
                                          system.spec().cone_sensitivity, system.spec().retina_focal);
  return s;
}

std::vector<Configuration> sample_configurations(const System& system, ExplorationMode mode,
                                                 double amplitude_deg, int count,
                                                 std::uint64_t seed) {
  if (!(amplitude_deg > 0.0)) throw ValidationError("amplitude", "must be > 0");
  if (count < 1) throw ValidationError("N", "must be >= 1");
  const auto free = free_parameters(mode, system.spec().n_sources);
  Rng rng(seed);
  std::vector<Configuration> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Configuration c = system.reference();
    for (int k : free) c[k] += rng.uniform(-amplitude_deg, amplitude_deg);
    out.push_back(std::move(c));
  }
  return out;
}

Eigen::MatrixXd configuration_offsets(const System& system, ExplorationMode mode,
                                      std::span<const Configuration> configs) {
  const auto free = free_parameters(mode, system.spec().n_sources);
  Eigen::MatrixXd off(static_cast<Eigen::Index>(free.size()), static_cast<Eigen::Index>(configs.size()));
  for (std::size_t i = 0; i < configs.size(); ++i)
    for (std::size_t r = 0; r < free.size(); ++r)
      off(r, i) = configs[i][free[r]] - system.reference()[free[r]];
  return off;
}

std::vector<Configuration> configurations_from_offsets(const System& system, ExplorationMode mode,
                                                       const Eigen::MatrixXd& offsets) {
  const auto free = free_parameters(mode, system.spec().n_sources);
  if (offsets.rows() != static_cast<Eigen::Index>(free.size()))
    throw ValidationError("offsets", "row count must equal the mode's free parameters");
  std::vector<Configuration> out;
  out.reserve(offsets.cols());
  for (Eigen::Index i = 0; i < offsets.cols(); ++i) {
    Configuration c = system.reference();
    for (std::size_t r = 0; r < free.size(); ++r) c[free[r]] += offsets(r, i);
    out.push_back(std::move(c));
  }
  return out;
}

Eigen::MatrixXd raw_variations(const System& system, std::span<const Configuration> configs) {
  if (configs.empty()) throw ValidationError("configs", "must be non-empty");
  const Eigen::VectorXd s0 = sense(system, system.reference());
  Eigen::MatrixXd out(s0.size(), static_cast<Eigen::Index>(configs.size()));
  for (std::size_t i = 0; i < configs.size(); ++i) out.col(i) = sense(system, configs[i]) - s0;
  return out;
}

VariationMatrix center_and_reduce(Eigen::MatrixXd raw, ExplorationMode mode, double amplitude_deg) {
  VariationMatrix vm;
  const Eigen::Index n = raw.rows(), N = raw.cols();
  vm.preprocessing.row_mean = raw.rowwise().mean();
  vm.preprocessing.row_scale = Eigen::VectorXd::Ones(n);
  raw.colwise() -= vm.preprocessing.row_mean;
  if (N > 1) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const double sd = std::sqrt(raw.row(r).squaredNorm() / static_cast<double>(N - 1));
      if (sd >= kZeroDeviation) {
        raw.row(r) /= sd;
        vm.preprocessing.row_scale[r] = sd;
      }
    }
  }
  vm.data = std::move(raw);
  vm.mode = mode;
  vm.amplitude = amplitude_deg;
  return vm;
}

VariationMatrix explore(const System& system, std::span<const Configuration> configs,
                        ExplorationMode mode, double amplitude_deg) {
  return center_and_reduce(raw_variations(system, configs), mode, amplitude_deg);
}

} // namespace smdim
