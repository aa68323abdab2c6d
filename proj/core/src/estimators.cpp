#include "smdim/estimators.hpp"

#include "smdim/error.hpp"

#include <Eigen/SVD>

#include <string>

namespace smdim {

std::string_view to_string(Method method) {
  switch (method) {
  case Method::Linear: return "linear";
  case Method::CCA: return "cca";
  case Method::CCABootInfinitesimal: return "cca-boot-inf";
  case Method::CCABootFinite: return "cca-boot-finite";
  }
  return "?";
}

Method parse_method(std::string_view text) {
  if (text == "linear") return Method::Linear;
  if (text == "cca") return Method::CCA;
  if (text == "cca-boot-inf") return Method::CCABootInfinitesimal;
  if (text == "cca-boot-finite") return Method::CCABootFinite;
  throw ValidationError("method", "unknown method '" + std::string(text) + "'");
}

SvdFactors svd_factors(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

SingularSpectrum singular_spectrum(const Eigen::MatrixXd& m) {
  if (m.size() == 0) throw ValidationError("S", "matrix is empty");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  SingularSpectrum out{std::vector<double>(s.data(), s.data() + s.size())};
  check_spectrum(out);
  return out;
}

void check_spectrum(const SingularSpectrum& spectrum) {
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    if (!(spectrum[j] >= 0.0)) throw NumericalError("spectrum has a negative or NaN value");
    if (j > 0 && spectrum[j] > spectrum[j - 1])
      throw NumericalError("spectrum is not in non-increasing order");
  }
}

DimensionEstimate estimate_dim_linear(const SingularSpectrum& spectrum) {
  if (spectrum.size() < 2) throw ValidationError("spectrum", "needs at least two values");
  check_spectrum(spectrum);
  if (spectrum[0] == 0.0) throw NumericalError("degenerate spectrum");

  int best = 1;
  double best_ratio = -1.0;
  for (std::size_t j = 0; j + 1 < spectrum.size(); ++j) {
    if (spectrum[j + 1] == 0.0) {
      // spectrum[j] > 0 here: earlier zeros would have returned already.
      best = static_cast<int>(j) + 1;
      break;
    }
    const double r = spectrum[j] / spectrum[j + 1];
    if (r > best_ratio) {
      best_ratio = r;
      best = static_cast<int>(j) + 1;
    }
  }
  return {best, Method::Linear, spectrum.values};
}

} // namespace smdim
