#pragma once

#include "smdim/estimators.hpp"
#include "smdim/system.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string_view>
#include <vector>

namespace smdim {

enum class BootstrapStrategy { Infinitesimal, Finite };

std::string_view to_string(BootstrapStrategy strategy);

struct BootstrapParams {
  int iterations = 10;                 ///< B
  double clamp = 10.0;                 ///< L, upper bound of the reshaping gains
  double significance_threshold = 1.0; ///< on singular values of the normalised silent-command matrix
  BootstrapStrategy strategy = BootstrapStrategy::Infinitesimal;
  double infinitesimal_amplitude = 1e-6;  ///< deg
  double target_amplitude = 1e-6;         ///< deg

  void validate() const;
};

/// Relative cut-off below which singular values are ignored by pinv().
inline constexpr double kPinvTolerance = 1e-12;
/// Condition number above which the command basis is flagged in the trace.
inline constexpr double kConditionWarning = 1e12;

/// Moore-Penrose pseudoinverse through the SVD.
Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double rel_tol = kPinvTolerance);

/// Gains Gamma_j = min(ln(sigma_1 / sigma_j) + 1, L); sigma_j = 0 gives L.
Eigen::VectorXd reshaping_gains(const SingularSpectrum& spectrum, double clamp);

/// sigma_1 / sigma_k where k is the linear estimate of the spectrum.
double spread_metric(const SingularSpectrum& spectrum);

struct BootstrapRecord {
  SingularSpectrum spectrum;   ///< of the normalised, row-centred sensory variations
  Eigen::VectorXd gains;       ///< Gamma
  double cmax = 0.0;           ///< max |C| before the step
  double spread = 0.0;
  int silent_directions = 0;   ///< columns of the silent-command basis
  bool ill_conditioned = false;
};

struct BootstrapTrace {
  std::vector<BootstrapRecord> records;
};

struct BootstrapStepResult {
  Eigen::MatrixXd commands;  ///< dof x N offsets from C0, deg
  BootstrapRecord record;
};

/// One unstretching iteration on the command offsets (dof x N, free
/// parameters of `mode` only). The returned commands have the same max |C|.
BootstrapStepResult bootstrap_step(const System& system, ExplorationMode mode,
                                   const Eigen::MatrixXd& commands, const BootstrapParams& params);

struct BootstrapResult {
  Eigen::MatrixXd commands;  ///< final command offsets, max |C| = target amplitude
  BootstrapTrace trace;
};

/// Uniform random start, then B iterations at the strategy's working
/// amplitude, then rescaling to the target amplitude.
BootstrapResult run_bootstrap(const System& system, ExplorationMode mode, const BootstrapParams& params,
                              int samples, std::uint64_t seed);

} // namespace smdim
