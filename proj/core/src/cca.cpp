#include "smdim/cca.hpp"

#include "smdim/error.hpp"
#include "smdim/rng.hpp"

#include "fast_exp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace smdim {

std::string_view to_string(NeighborhoodKernel kernel) {
  return kernel == NeighborhoodKernel::Step ? "step" : "exponential";
}

NeighborhoodKernel parse_kernel(std::string_view text) {
  if (text == "step") return NeighborhoodKernel::Step;
  if (text == "exponential" || text == "exp") return NeighborhoodKernel::Exponential;
  throw ValidationError("kernel", "unknown neighbourhood kernel '" + std::string(text) + "'");
}

void CcaParams::validate() const {
  if (iterations < 1) throw ValidationError("iterations", "must be >= 1");
  if (!(lr_final > 0.0)) throw ValidationError("lr_final", "must be > 0");
  if (!(lr_initial >= lr_final)) throw ValidationError("lr_initial", "must be >= lr_final");
  if (!(neighborhood_final > 0.0)) throw ValidationError("neighborhood_final", "must be > 0");
  if (!(neighborhood_initial >= neighborhood_final))
    throw ValidationError("neighborhood_initial", "must be >= neighborhood_final");
}

double CcaParams::learning_rate(double t) const {
  return lr_initial * std::pow(lr_final / lr_initial, t / iterations);
}

double CcaParams::neighborhood(double t) const {
  return neighborhood_initial * std::pow(neighborhood_final / neighborhood_initial, t / iterations);
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& points) {
  const Eigen::Index N = points.cols();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(N, N);
  for (Eigen::Index j = 0; j < N; ++j)
    for (Eigen::Index i = j + 1; i < N; ++i) {
      const double v = (points.col(i) - points.col(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  return d;
}

double cca_cost(const Eigen::MatrixXd& input_dists, const Eigen::MatrixXd& output_dists, double lambda) {
  if (input_dists.rows() != output_dists.rows() || input_dists.cols() != output_dists.cols())
    throw ValidationError("output_dists", "shape differs from input_dists");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < input_dists.cols(); ++j)
    for (Eigen::Index i = 0; i < input_dists.rows(); ++i) {
      if (i == j) continue;
      const double y = output_dists(i, j);
      if (y <= lambda) {
        const double e = input_dists(i, j) - y;
        sum += e * e;
      }
    }
  return 0.5 * sum;
}

namespace {

inline double kernel_weight(NeighborhoodKernel kind, double d, double lambda) {
  if (kind == NeighborhoodKernel::Step) return d <= lambda ? 1.0 : 0.0;
  return std::exp(-d / lambda);
}

// Points are kept as rows (N x p) so every coordinate is a contiguous column.
struct Layout {
  Eigen::MatrixXd rows;   // N x p
  Eigen::VectorXd norm2;  // squared row norms, maintained by the step kernel path

  explicit Layout(Eigen::MatrixXd r) : rows(std::move(r)), norm2(rows.rowwise().squaredNorm()) {}
};

// Exact distance when the pair may lie within `lambda`, -1 otherwise. The
// Gram-based prefilter only discards pairs that are clearly outside.
inline double near_distance(const Layout& y, Eigen::Index i, Eigen::Index j, double gij, double lambda2) {
  const double ni = y.norm2[i], nj = y.norm2[j];
  const double approx = ni + nj - 2.0 * gij;
  if (approx > lambda2 + 1e-10 * (ni + nj)) return -1.0;
  return (y.rows.row(j) - y.rows.row(i)).norm();
}

// Distances from row i to every row, computed by direct differences.
void distances_from(const Eigen::MatrixXd& rows, Eigen::Index i, Eigen::MatrixXd& diff, Eigen::ArrayXd& dist) {
  const Eigen::Index p = rows.cols();
  dist.setZero();
  for (Eigen::Index k = 0; k < p; ++k) {
    diff.col(k).array() = rows.col(k).array() - rows(i, k);
    dist += diff.col(k).array().square();
  }
  dist = dist.sqrt();
}

double stress_of(const Eigen::MatrixXd& input_dists, const Layout& y, NeighborhoodKernel kind, double lambda) {
  const Eigen::Index N = y.rows.rows();
  double sum = 0.0;
  if (kind == NeighborhoodKernel::Step) {
    const double lambda2 = lambda * lambda;
    Eigen::VectorXd g(N);
    for (Eigen::Index i = 0; i < N; ++i) {
      g.noalias() = y.rows * y.rows.row(i).transpose();
      for (Eigen::Index j = i + 1; j < N; ++j) {
        const double d = near_distance(y, i, j, g[j], lambda2);
        if (d < 0.0 || d > lambda) continue;
        const double e = input_dists(j, i) - d;
        sum += e * e;
      }
    }
  } else {
    Eigen::MatrixXd diff(N, y.rows.cols());
    Eigen::ArrayXd dist(N);
    for (Eigen::Index i = 0; i < N; ++i) {
      distances_from(y.rows, i, diff, dist);
      for (Eigen::Index j = i + 1; j < N; ++j) {
        const double e = input_dists(j, i) - dist[j];
        sum += e * e * std::exp(-dist[j] / lambda);
      }
    }
  }
  // Half the ordered-pair sum is the sum over unordered pairs.
  return sum;
}

Eigen::MatrixXd random_start(const Eigen::MatrixXd& data, int p, std::uint64_t seed) {
  const Eigen::Index N = data.cols();
  const Eigen::VectorXd centroid = data.rowwise().mean();
  const double rms_in = std::sqrt((data.colwise() - centroid).colwise().squaredNorm().mean());
  // Uniform [-1,1]^p has RMS norm sqrt(p/3); match the input's.
  const double scale = rms_in > 0.0 ? rms_in / std::sqrt(p / 3.0) : 1.0;
  Rng rng(derive_seed(seed, "cca-init"));
  Eigen::MatrixXd out(N, p);
  for (Eigen::Index i = 0; i < N; ++i)
    for (int k = 0; k < p; ++k) out(i, k) = scale * rng.uniform(-1.0, 1.0);
  return out;
}

// Hard neighbourhood: only the few pairs inside lambda move, so candidates are
// found with one matrix-vector product and handled one by one.
void step_pivot(Layout& y, const Eigen::MatrixXd& input_dists, Eigen::Index i, double lr, double lambda,
                Eigen::VectorXd& g) {
  const Eigen::Index N = y.rows.rows();
  const double lambda2 = lambda * lambda;
  g.noalias() = y.rows * y.rows.row(i).transpose();
  for (Eigen::Index j = 0; j < N; ++j) {
    if (j == i) continue;
    const double d = near_distance(y, i, j, g[j], lambda2);
    if (d <= 0.0 || d > lambda) continue;
    const double step = lr * (input_dists(j, i) - d) / d;
    y.rows.row(j) += step * (y.rows.row(j) - y.rows.row(i));
    y.norm2[j] = y.rows.row(j).squaredNorm();
  }
}

// Exponential neighbourhood: every pair moves, so the update is done densely,
// one coordinate column at a time.
void exponential_pivot(Layout& y, const Eigen::MatrixXd& input_dists, Eigen::Index i, double lr, double lambda,
                       Eigen::ArrayXd& dist2, Eigen::ArrayXd& coef) {
  const Eigen::Index N = y.rows.rows(), p = y.rows.cols();
  double* __restrict d2 = dist2.data();
  double* __restrict w = coef.data();
  std::fill(d2, d2 + N, 0.0);
  for (Eigen::Index k = 0; k < p; ++k) {
    const double* col = y.rows.col(k).data();
    const double c = col[i];
    for (Eigen::Index j = 0; j < N; ++j) {
      const double t = col[j] - c;
      d2[j] += t * t;
    }
  }
  const double* x = input_dists.col(i).data();
  const double inv_lambda = 1.0 / lambda;
  for (Eigen::Index j = 0; j < N; ++j) {
    const double d = std::sqrt(d2[j]);
    const double arg = -std::min(d * inv_lambda, 708.0);
    // Coincident points have a zero difference vector; the offset only keeps
    // the coefficient finite.
    w[j] = lr * detail::exp_nonpositive(arg) * (x[j] / (d + 1e-300) - 1.0);
  }
  w[i] = 0.0;
  for (Eigen::Index k = 0; k < p; ++k) {
    double* col = y.rows.col(k).data();
    const double c = col[i];
    for (Eigen::Index j = 0; j < N; ++j) col[j] += w[j] * (col[j] - c);
  }
}

} // namespace

double cca_cost(const Eigen::MatrixXd& input_dists, const Eigen::MatrixXd& output_dists, double lambda,
                NeighborhoodKernel kernel) {
  if (input_dists.rows() != output_dists.rows() || input_dists.cols() != output_dists.cols())
    throw ValidationError("output_dists", "shape differs from input_dists");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < input_dists.cols(); ++j)
    for (Eigen::Index i = 0; i < input_dists.rows(); ++i) {
      if (i == j) continue;
      const double y = output_dists(i, j);
      const double e = input_dists(i, j) - y;
      sum += e * e * kernel_weight(kernel, y, lambda);
    }
  return 0.5 * sum;
}

double cca_cost_from_points(const Eigen::MatrixXd& input_dists, const Eigen::MatrixXd& points, double lambda,
                            NeighborhoodKernel kernel) {
  if (input_dists.rows() != points.cols() || input_dists.cols() != points.cols())
    throw ValidationError("points", "count differs from input_dists");
  return stress_of(input_dists, Layout(points.transpose()), kernel, lambda);
}

Projection cca_project(const Eigen::MatrixXd& data, int p, const CcaParams& params,
                       const std::optional<Eigen::MatrixXd>& init) {
  return cca_project(data, pairwise_distances(data), p, params, init);
}

Projection cca_project(const Eigen::MatrixXd& data, const Eigen::MatrixXd& input_dists, int p,
                       const CcaParams& params, const std::optional<Eigen::MatrixXd>& init) {
  params.validate();
  const Eigen::Index N = data.cols();
  if (p < 1) throw ValidationError("p", "must be >= 1");
  if (p > data.rows()) throw ValidationError("p", "exceeds the input dimension");
  if (N < 2) throw ValidationError("N", "needs at least two points");
  if (input_dists.rows() != N || input_dists.cols() != N)
    throw ValidationError("input_dists", "must be N x N");

  Layout y = [&] {
    if (!init) return Layout(random_start(data, p, params.seed));
    if (init->rows() != p || init->cols() != N) throw ValidationError("init", "must be p x N");
    return Layout(init->transpose());
  }();

  Rng order_rng(derive_seed(params.seed, "cca-order"));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::VectorXd g(N);
  Eigen::ArrayXd dist2(N), coef(N);

  for (int sweep = 0; sweep < params.iterations; ++sweep) {
    for (std::size_t k = order.size() - 1; k > 0; --k)
      std::swap(order[k], order[order_rng.below(k + 1)]);

    for (Eigen::Index s = 0; s < N; ++s) {
      const Eigen::Index i = order[static_cast<std::size_t>(s)];
      const double t = sweep + static_cast<double>(s) / static_cast<double>(N);
      const double lr = params.learning_rate(t);
      const double lambda = params.neighborhood(t);
      // The pivot stays fixed while the others move relative to it.
      if (params.kernel == NeighborhoodKernel::Step)
        step_pivot(y, input_dists, i, lr, lambda, g);
      else
        exponential_pivot(y, input_dists, i, lr, lambda, dist2, coef);
    }
  }

  Projection out;
  out.p = p;
  out.final_cost = stress_of(input_dists, y, params.kernel, params.neighborhood_final);
  out.points = y.rows.transpose();
  return out;
}

CostProfile cca_cost_profile(const Eigen::MatrixXd& data, int p_max, const CcaParams& params) {
  if (p_max < 1) throw ValidationError("p_max", "must be >= 1");
  if (p_max > data.rows()) throw ValidationError("p_max", "exceeds the input dimension");
  const Eigen::MatrixXd dists = pairwise_distances(data);
  CostProfile profile;
  profile.collapse_cost = 0.5 * dists.squaredNorm();
  profile.input_dim = static_cast<int>(data.rows());
  profile.costs.reserve(static_cast<std::size_t>(p_max));
  for (int p = 1; p <= p_max; ++p) {
    CcaParams per_p = params;
    per_p.seed = derive_seed(params.seed, "cca-p", {static_cast<std::uint64_t>(p)});
    profile.costs.push_back(cca_project(data, dists, p, per_p).final_cost);
  }
  return profile;
}

int estimate_dim_from_costs(const CostProfile& profile) {
  if (profile.p_max() < 2) throw ValidationError("p_max", "must be >= 2");
  for (double c : profile.costs)
    if (!(c >= 0.0)) throw NumericalError("cost profile has a negative or NaN value");
  bool all_zero = true;
  for (double c : profile.costs) all_zero = all_zero && c == 0.0;
  if (all_zero) throw NumericalError("degenerate profile");

  // A one-dimensional projection that keeps almost all of the collapse cost
  // means the data is a single curve at the kernel's resolution.
  if (profile.collapse_cost > 0.0 && profile.at(1) <= kNegligibleCost * profile.collapse_cost) return 1;

  // J(n) is always reachable at zero (identity embedding), so p = n is never scanned.
  int last = profile.p_max();
  if (profile.input_dim > 0) last = std::min(last, profile.input_dim - 1);
  if (last < 2) return std::min(profile.p_max(), std::max(profile.input_dim, 2));

  int best = 2;
  double best_ratio = -1.0;
  for (int p = 2; p <= last; ++p) {
    const double prev = profile.at(p - 1), cur = profile.at(p);
    if (cur == 0.0) {
      if (prev > 0.0) return p;
      continue;
    }
    const double r = prev / cur;
    if (r > best_ratio) {
      best_ratio = r;
      best = p;
    }
  }
  return best;
}

CcaEstimate estimate_dim_cca(const Eigen::MatrixXd& data, int p_max, const CcaParams& params) {
  if (p_max < 2) throw ValidationError("p_max", "must be >= 2");
  CcaEstimate out;
  out.profile = cca_cost_profile(data, p_max, params);
  out.estimate.value = estimate_dim_from_costs(out.profile);
  out.estimate.method = Method::CCA;
  out.estimate.diagnostics = out.profile.costs;
  return out;
}

} // namespace smdim
