#pragma once

#include "smdim/estimators.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string_view>

namespace smdim {

/// Curvilinear Component Analysis hyper-parameters. Learning rate and
/// neighbourhood radius decay geometrically from their initial to final value
/// over `iterations` full sweeps (every point acts once as pivot per sweep).
enum class NeighborhoodKernel {
  Step,        ///< F(Y) = [Y <= lambda]
  Exponential  ///< F(Y) = exp(-Y / lambda)
};

std::string_view to_string(NeighborhoodKernel kernel);
NeighborhoodKernel parse_kernel(std::string_view text);

struct CcaParams {
  int iterations = 100;
  double lr_initial = 0.5;
  double lr_final = 5e-4;
  double neighborhood_initial = 4.0;
  double neighborhood_final = 0.2;
  NeighborhoodKernel kernel = NeighborhoodKernel::Exponential;
  std::uint64_t seed = 0;

  void validate() const;

  /// value(t) = v0 * (vK / v0)^(t / K), t in sweeps (fractional within a sweep).
  double learning_rate(double t) const;
  double neighborhood(double t) const;
};

struct Projection {
  Eigen::MatrixXd points;  ///< p x N
  double final_cost = 0.0;
  int p = 0;
};

/// J(p) for p = 1..p_max; costs[p - 1] holds J(p). collapse_cost is J(0),
/// the stress of mapping every point to one location; input_dim is n (0 when
/// unknown).
struct CostProfile {
  std::vector<double> costs;
  double collapse_cost = 0.0;
  int input_dim = 0;

  int p_max() const noexcept { return static_cast<int>(costs.size()); }
  double at(int p) const { return costs.at(static_cast<std::size_t>(p - 1)); }
};

/// Euclidean distances between the columns of `points` (N x N, symmetric,
/// computed by direct differences).
Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points);

/// CCA stress J = 1/2 sum_{i != j} (X_ij - Y_ij)^2 F(Y_ij, lambda).
double cca_cost(const Eigen::MatrixXd& input_dists, const Eigen::MatrixXd& output_dists, double lambda,
                NeighborhoodKernel kernel = NeighborhoodKernel::Exponential);

/// Same stress evaluated directly from output coordinates (p x N).
double cca_cost_from_points(const Eigen::MatrixXd& input_dists, const Eigen::MatrixXd& points, double lambda,
                            NeighborhoodKernel kernel = NeighborhoodKernel::Exponential);

/// Projects the columns of `data` (n x N) to p dimensions. When `init` is
/// given it replaces the random start (must be p x N).
Projection cca_project(const Eigen::MatrixXd& data, int p, const CcaParams& params,
                       const std::optional<Eigen::MatrixXd>& init = std::nullopt);

/// Variant reusing precomputed input distances.
Projection cca_project(const Eigen::MatrixXd& data, const Eigen::MatrixXd& input_dists, int p,
                       const CcaParams& params, const std::optional<Eigen::MatrixXd>& init = std::nullopt);

/// Runs cca_project for p = 1..p_max (seed derived per p).
CostProfile cca_cost_profile(const Eigen::MatrixXd& data, int p_max, const CcaParams& params);

struct CcaEstimate {
  DimensionEstimate estimate;
  CostProfile profile;
};

/// Dimension from the cost profile (see estimate_dim_from_costs).
CcaEstimate estimate_dim_cca(const Eigen::MatrixXd& data, int p_max, const CcaParams& params);

/// Relative size of J(1) against J(0) under which the data counts as 1-D.
inline constexpr double kNegligibleCost = 1e-6;

/// Returns 1 when J(1) <= kNegligibleCost * J(0). Otherwise argmax_p
/// J(p-1)/J(p) over p in [2, min(p_max, n - 1)], ties to the smallest p; a
/// zero cost is an infinite ratio and the smallest such p wins.
/// Throws NumericalError("degenerate profile") when every cost is zero.
int estimate_dim_from_costs(const CostProfile& profile);

} // namespace smdim
