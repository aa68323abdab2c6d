#pragma once

#include "smdim/bootstrap.hpp"
#include "smdim/cca.hpp"
#include "smdim/system.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smdim {

/// Whole file as a string. Throws IoError naming the path.
std::string read_text_file(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string spec_to_json(const SystemSpec& spec);
SystemSpec spec_from_json(const std::string& text);

/// System plus an optional configuration set, as JSON with the fields
/// spec, cone_positions, reference_config and configs.
struct SystemDocument {
  System system;
  std::vector<Configuration> configs;
};

std::string system_to_json(const System& system, std::span<const Configuration> configs = {});
SystemDocument system_from_json(const std::string& text);

/// Comma separated rows at full (round-trip) precision. Lines starting with
/// '#' are comments.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(std::istream& in);

/// Matrix CSV preceded by "# mode=..." and "# amplitude=..." comment lines.
void write_variation_csv(std::ostream& out, const VariationMatrix& vm);
VariationMatrix read_variation_csv(std::istream& in);

/// Header "p,J", one row per projection dimension.
void write_cost_profile_csv(std::ostream& out, const CostProfile& profile);

/// Header "iteration,sigma_1..sigma_r,spread,cmax".
void write_bootstrap_trace_csv(std::ostream& out, const BootstrapTrace& trace);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

} // namespace smdim
