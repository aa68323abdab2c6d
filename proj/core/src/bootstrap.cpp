#include "smdim/bootstrap.hpp"

#include "smdim/error.hpp"
#include "smdim/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace smdim {

std::string_view to_string(BootstrapStrategy strategy) {
  return strategy == BootstrapStrategy::Infinitesimal ? "infinitesimal" : "finite";
}

void BootstrapParams::validate() const {
  if (iterations < 1) throw ValidationError("iterations", "must be >= 1");
  if (!(clamp >= 1.0)) throw ValidationError("clamp", "must be >= 1");
  if (!(significance_threshold > 0.0)) throw ValidationError("significance_threshold", "must be > 0");
  if (!(infinitesimal_amplitude > 0.0)) throw ValidationError("infinitesimal_amplitude", "must be > 0");
  if (!(target_amplitude > 0.0)) throw ValidationError("target_amplitude", "must be > 0");
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cut = s.size() > 0 ? rel_tol * s[0] : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s[k] > cut && s[k] > 0.0) inv[k] = 1.0 / s[k];
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::VectorXd reshaping_gains(const SingularSpectrum& spectrum, double clamp) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(spectrum.size()));
  const double top = spectrum.size() ? spectrum[0] : 0.0;
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    if (j == 0) {
      g[k] = 1.0;
    } else if (spectrum[j] <= 0.0) {
      g[k] = clamp;
    } else {
      g[k] = std::min(std::log(top / spectrum[j]) + 1.0, clamp);
    }
  }
  return g;
}

double spread_metric(const SingularSpectrum& spectrum) {
  const int k = estimate_dim_linear(spectrum).value;
  return spectrum[0] / spectrum[static_cast<std::size_t>(k - 1)];
}

BootstrapStepResult bootstrap_step(const System& system, ExplorationMode mode,
                                   const Eigen::MatrixXd& commands, const BootstrapParams& params) {
  params.validate();
  const Eigen::Index dof = commands.rows(), N = commands.cols();
  if (N <= dof) throw NumericalError("insufficient exploration: N must exceed the number of free parameters");

  BootstrapRecord rec;

  // (1) sensory variations generated by the commands.
  const auto configs = configurations_from_offsets(system, mode, commands);
  Eigen::MatrixXd s = raw_variations(system, configs);

  // (2) normalise both matrices by their largest magnitude.
  rec.cmax = commands.cwiseAbs().maxCoeff();
  const double smax = s.cwiseAbs().maxCoeff();
  if (!(rec.cmax > 0.0)) throw NumericalError("command matrix is identically zero");
  if (!(smax > 0.0)) throw NumericalError("commands produce no sensory variation");
  const Eigen::MatrixXd c = commands / rec.cmax;
  s /= smax;
  s.colwise() -= s.rowwise().mean();

  // (3) right singular vectors explaining S.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeThinV);
  const Eigen::MatrixXd& basis = svd.matrixV();  // N x min(n, N)
  const auto& sv = svd.singularValues();
  rec.spectrum.values.assign(sv.data(), sv.data() + sv.size());
  rec.spread = spread_metric(rec.spectrum);

  // (4) the same directions in command space.
  Eigen::MatrixXd dirs = c * basis;  // dof x r

  // (5)-(6) commands orthogonal to every explaining direction are sensorially
  // silent. C V2 V2^T C^T = C C^T - (C V)(C V)^T, so V2 itself is never formed.
  // S was row-centred, so V is orthogonal to the constant vector; C must be
  // centred too or its mean column shows up as a spurious silent direction.
  Eigen::MatrixXd silent(dof, 0);
  if (N > s.rows()) {
    const Eigen::MatrixXd centred = c.colwise() - c.rowwise().mean();
    const Eigen::MatrixXd gram = centred * centred.transpose() - dirs * dirs.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double thr2 = params.significance_threshold * params.significance_threshold;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < dof; ++k)
      if (eig.eigenvalues()[k] > thr2) keep.push_back(k);
    silent.resize(dof, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
      silent.col(static_cast<Eigen::Index>(k)) = eig.eigenvectors().col(keep[k]);
  }
  rec.silent_directions = static_cast<int>(silent.cols());

  // (7) strip the silent components.
  if (silent.cols() > 0) dirs -= silent * (pinv(silent) * dirs);

  // (8) commands expressed in the explaining basis.
  Eigen::JacobiSVD<Eigen::MatrixXd> dsvd(dirs);
  const auto& ds = dsvd.singularValues();
  const Eigen::Index rank_cap = std::min(dirs.rows(), dirs.cols());
  rec.ill_conditioned = ds[0] <= 0.0 || ds[rank_cap - 1] <= ds[0] / kConditionWarning;
  const Eigen::MatrixXd coords = pinv(dirs) * c;  // r x N

  // (9)-(10) reshape and return to configuration space.
  rec.gains = reshaping_gains(rec.spectrum, params.clamp);
  Eigen::MatrixXd next = dirs * (rec.gains.asDiagonal() * coords);

  // (11) keep the maximal amplitude.
  const double nmax = next.cwiseAbs().maxCoeff();
  if (!(nmax > 0.0)) throw NumericalError("reshaped commands vanished");
  next *= rec.cmax / nmax;

  return {std::move(next), std::move(rec)};
}

BootstrapResult run_bootstrap(const System& system, ExplorationMode mode, const BootstrapParams& params,
                              int samples, std::uint64_t seed) {
  params.validate();
  const auto free = free_parameters(mode, system.spec().n_sources);
  const auto dof = static_cast<Eigen::Index>(free.size());
  if (samples <= dof) throw NumericalError("insufficient exploration: N must exceed the number of free parameters");

  const double working = params.strategy == BootstrapStrategy::Infinitesimal ? params.infinitesimal_amplitude
                                                                             : params.target_amplitude;
  Rng rng(derive_seed(seed, "bootstrap-commands"));
  Eigen::MatrixXd c(dof, samples);
  for (Eigen::Index i = 0; i < samples; ++i)
    for (Eigen::Index r = 0; r < dof; ++r) c(r, i) = rng.uniform(-working, working);

  BootstrapResult out;
  out.trace.records.reserve(static_cast<std::size_t>(params.iterations));
  for (int b = 0; b < params.iterations; ++b) {
    auto step = bootstrap_step(system, mode, c, params);
    c = std::move(step.commands);
    out.trace.records.push_back(std::move(step.record));
  }
  c *= params.target_amplitude / c.cwiseAbs().maxCoeff();
  out.commands = std::move(c);
  return out;
}

} // namespace smdim
