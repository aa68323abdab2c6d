#pragma once

#include <Eigen/Core>

#include <string_view>
#include <vector>

namespace smdim {

/// Singular values in non-increasing order.
struct SingularSpectrum {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t j) const { return values[j]; }
};

enum class Method { Linear, CCA, CCABootInfinitesimal, CCABootFinite };

std::string_view to_string(Method method);
/// Accepts the CLI spellings (linear, cca, cca-boot-inf, cca-boot-finite).
Method parse_method(std::string_view text);

struct DimensionEstimate {
  int value = 0;
  Method method = Method::Linear;
  /// Spectrum (linear) or cost profile J(1..p_max) (CCA variants).
  std::vector<double> diagnostics;
};

struct SvdFactors {
  Eigen::MatrixXd u;      ///< n x r
  Eigen::VectorXd sigma;  ///< r, non-increasing
  Eigen::MatrixXd v;      ///< N x r
};

/// Thin SVD, r = min(n, N).
SvdFactors svd_factors(const Eigen::MatrixXd& m);

SingularSpectrum singular_spectrum(const Eigen::MatrixXd& m);

/// Throws NumericalError when the values are not non-increasing or negative.
void check_spectrum(const SingularSpectrum& spectrum);

/// argmax_j sigma_j / sigma_{j+1} over j in [1, len-1] (1-based), ties to the
/// smallest j. A zero successor is an infinite ratio and wins immediately.
/// Throws NumericalError("degenerate spectrum") when every value is zero.
DimensionEstimate estimate_dim_linear(const SingularSpectrum& spectrum);

/// Dimension of the displacement group, d = e + m - b. Negative results are
/// returned as-is for the caller to flag.
constexpr int displacement_dim(int m, int e, int b) noexcept { return e + m - b; }

} // namespace smdim
