#pragma once

// Numeric realizations of the augmented system and observability checks on
// them: W(G) parametrization, PBH rank test, Kalman rank and batch
// least-squares reconstruction of the initial augmented state.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "netobs/structural.hpp"

namespace netobs {

using ComplexMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;

struct WParametrization {
  double low = 0.1;
  double high = 1.0;
  /// Minimum distance between eigenvalues of W, from the spectrum of A, and from 0.
  double separation = 1e-4;
  int retry_budget = 64;
};

namespace detail {

// Uniform draw in the open interval (low, high) from 53 random bits; unlike
// std::uniform_real_distribution the sequence is identical on every standard
// library.
inline double uniform_open(std::mt19937_64& gen, double low, double high) {
  double u = (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
  return low + (high - low) * u;
}

inline std::vector<std::complex<double>> eigenvalues(const DenseMatrix& m) {
  if (m.rows() == 0) return {};
  Eigen::EigenSolver<DenseMatrix> es(m, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue computation failed");
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

inline bool well_separated(const std::vector<std::complex<double>>& w_eigs,
                           const std::vector<std::complex<double>>& a_eigs, double sep) {
  for (std::size_t p = 0; p < w_eigs.size(); ++p) {
    if (std::abs(w_eigs[p]) <= sep) return false;
    for (std::size_t q = p + 1; q < w_eigs.size(); ++q)
      if (std::abs(w_eigs[p] - w_eigs[q]) <= sep) return false;
    for (const auto& mu : a_eigs)
      if (std::abs(w_eigs[p] - mu) <= sep) return false;
  }
  return true;
}

}  // namespace detail

/// True when W has simple eigenvalues, none of them in the spectrum of A or at zero,
/// all up to the separation tolerance.
inline bool w_admissible(const DenseMatrix& w, const DenseMatrix& a, double separation = 1e-4) {
  return detail::well_separated(detail::eigenvalues(w), detail::eigenvalues(a), separation);
}

/// Draws W(G) uniformly on its pattern until it is admissible. Deterministic
/// for a given seed; throws std::runtime_error when the retry budget runs out.
inline DenseMatrix parametrize_w(const SparsityPattern& pattern, const DenseMatrix& a_values,
                                 std::uint64_t seed, const WParametrization& opt = {}) {
  if (!pattern.square()) throw std::invalid_argument("parametrize_w: pattern must be square");
  for (std::size_t k = 0; k < pattern.rows(); ++k)
    if (!pattern.contains(k, k))
      throw std::invalid_argument("parametrize_w: diagonal entry " + std::to_string(k + 1) +
                                  " missing from the pattern");
  if (a_values.rows() != a_values.cols())
    throw std::invalid_argument("parametrize_w: A must be square");

  const auto a_eigs = detail::eigenvalues(a_values);
  const auto nz = pattern.nonzeros();
  const auto m = static_cast<Eigen::Index>(pattern.rows());
  std::mt19937_64 gen(seed);
  for (int attempt = 0; attempt < opt.retry_budget; ++attempt) {
    DenseMatrix w = DenseMatrix::Zero(m, m);
    for (auto [r, c] : nz)
      w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          detail::uniform_open(gen, opt.low, opt.high);
    if (detail::well_separated(detail::eigenvalues(w), a_eigs, opt.separation)) return w;
  }
  throw std::runtime_error("parametrize_w: no admissible W(G) within " +
                           std::to_string(opt.retry_budget) + " draws (seed " +
                           std::to_string(seed) + ")");
}

/// [A 0; C W].
inline DenseMatrix assemble_augmented(const DenseMatrix& a, const DenseMatrix& c,
                                      const DenseMatrix& w) {
  const Eigen::Index n = a.rows(), m = w.rows();
  if (a.cols() != n || w.cols() != m || c.rows() != m || c.cols() != n)
    throw std::invalid_argument("assemble_augmented: expected A n x n, C m x n, W m x m");
  DenseMatrix out = DenseMatrix::Zero(n + m, n + m);
  out.topLeftCorner(n, n) = a;
  out.bottomLeftCorner(m, n) = c;
  out.bottomRightCorner(m, m) = w;
  return out;
}

/// Fills absent numeric values with the 0/1 realization of the patterns.
inline SystemSpec with_default_values(SystemSpec s) {
  if (!s.a_values) s.a_values = s.a_pattern.to_dense();
  if (!s.c_values) s.c_values = s.c_pattern.to_dense();
  return s;
}

/// Numeric C̃_i: [c_i 0; 0 I_sel] with selector rows for the in-neighbors of i.
inline DenseMatrix sensor_output_matrix(const SystemSpec& s, std::size_t i) {
  if (!s.c_values) throw std::invalid_argument("sensor_output_matrix: numeric C values missing");
  auto nbrs = in_neighbors(s, i);
  const auto n = static_cast<Eigen::Index>(s.n());
  const auto m = static_cast<Eigen::Index>(s.m());
  DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(1 + nbrs.size()), n + m);
  out.row(0).head(n) = s.c_values->row(static_cast<Eigen::Index>(i));
  for (std::size_t k = 0; k < nbrs.size(); ++k)
    out(static_cast<Eigen::Index>(1 + k), n + static_cast<Eigen::Index>(nbrs[k])) = 1.0;
  return out;
}

struct PbhReport {
  std::vector<std::complex<double>> eigenvalues;
  /// sigma_min / sigma_max of [Ã - λI; C̃] at each eigenvalue.
  std::vector<double> min_singular_per_eigenvalue;
  bool observable = false;
  /// Effective threshold (requested tolerance times the state dimension).
  double tolerance = 0.0;

  double margin() const {
    return min_singular_per_eigenvalue.empty()
               ? 1.0
               : *std::min_element(min_singular_per_eigenvalue.begin(),
                                   min_singular_per_eigenvalue.end());
  }
};

namespace detail {

inline double pbh_ratio(const DenseMatrix& a_tilde, const DenseMatrix& c_tilde,
                        std::complex<double> lambda) {
  const Eigen::Index n = a_tilde.rows(), p = c_tilde.rows();
  ComplexMatrix stack(n + p, n);
  stack.topRows(n) = a_tilde.cast<std::complex<double>>();
  stack.topRows(n).diagonal().array() -= lambda;
  stack.bottomRows(p) = c_tilde.cast<std::complex<double>>();
  Eigen::JacobiSVD<ComplexMatrix> svd(stack);
  const auto& sv = svd.singularValues();
  return sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
}

// Mean of each eigenvalue's cluster (single linkage at `radius`). A defective
// eigenvalue comes back from the solver as a ring of perturbed copies whose
// mean is far more accurate than any member.
inline std::vector<std::complex<double>> cluster_means(const std::vector<std::complex<double>>& ev,
                                                       double radius) {
  const std::size_t k = ev.size();
  std::vector<std::size_t> label(k);
  for (std::size_t a = 0; a < k; ++a) label[a] = a;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b)
        if (label[a] != label[b] && std::abs(ev[a] - ev[b]) <= radius) {
          std::size_t lo = std::min(label[a], label[b]);
          label[a] = label[b] = lo;
          changed = true;
        }
  }
  std::vector<std::complex<double>> out(k);
  for (std::size_t a = 0; a < k; ++a) {
    std::complex<double> sum = 0.0;
    std::size_t cnt = 0;
    for (std::size_t b = 0; b < k; ++b)
      if (label[b] == label[a]) {
        sum += ev[b];
        ++cnt;
      }
    out[a] = sum / static_cast<double>(cnt);
  }
  return out;
}

}  // namespace detail

/// Popov-Belevitch-Hautus test evaluated at every eigenvalue of `a_tilde`,
/// in complex arithmetic. Each eigenvalue is also tested at the mean of its
/// cluster so that defective eigenvalues are not missed; the smaller of the
/// two margins is kept.
inline PbhReport pbh_check(const DenseMatrix& a_tilde, const DenseMatrix& c_tilde,
                           double tol = 1e-8) {
  const Eigen::Index n = a_tilde.rows();
  if (a_tilde.cols() != n) throw std::invalid_argument("pbh_check: Ã must be square");
  if (c_tilde.cols() != n) throw std::invalid_argument("pbh_check: C̃ column count mismatch");

  PbhReport rep;
  rep.tolerance = tol * static_cast<double>(std::max<Eigen::Index>(n, 1));
  rep.eigenvalues = detail::eigenvalues(a_tilde);
  const double radius = 1e-3 * std::max(1.0, a_tilde.norm());
  const auto means = detail::cluster_means(rep.eigenvalues, radius);
  rep.observable = true;
  for (std::size_t k = 0; k < rep.eigenvalues.size(); ++k) {
    double ratio = detail::pbh_ratio(a_tilde, c_tilde, rep.eigenvalues[k]);
    if (means[k] != rep.eigenvalues[k])
      ratio = std::min(ratio, detail::pbh_ratio(a_tilde, c_tilde, means[k]));
    rep.min_singular_per_eigenvalue.push_back(ratio);
    if (!(ratio > rep.tolerance)) rep.observable = false;
  }
  return rep;
}

/// Numerical rank of [C; CA; ...; CA^(N-1)], N = dim(Ã) <= 30. A is rescaled
/// to unit Frobenius norm and every row normalized before the SVD; neither
/// changes the rank.
inline std::size_t observability_matrix_rank(const DenseMatrix& a_tilde, const DenseMatrix& c_tilde,
                                             double rel_tol = 1e-9) {
  const Eigen::Index n = a_tilde.rows();
  if (a_tilde.cols() != n || c_tilde.cols() != n)
    throw std::invalid_argument("observability_matrix_rank: dimension mismatch");
  if (n > 30) throw std::invalid_argument("observability_matrix_rank: dimension above 30");
  if (n == 0 || c_tilde.rows() == 0) return 0;

  const double norm = a_tilde.norm();
  const DenseMatrix a = norm > 0.0 ? DenseMatrix(a_tilde / norm) : a_tilde;
  const Eigen::Index p = c_tilde.rows();
  DenseMatrix obs(n * p, n);
  DenseMatrix block = c_tilde;
  for (Eigen::Index k = 0; k < n; ++k) {
    obs.middleRows(k * p, p) = block;
    block = block * a;
  }
  for (Eigen::Index r = 0; r < obs.rows(); ++r) {
    double rn = obs.row(r).norm();
    if (rn > 0.0) obs.row(r) /= rn;
  }
  Eigen::JacobiSVD<DenseMatrix> svd(obs);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > rel_tol * sv(0)) ++rank;
  return rank;
}

struct Reconstruction {
  Vector estimate;
  double relative_error = 0.0;
  double residual = 0.0;
  std::size_t rank = 0;
  /// The stacked system is rank deficient: x̃[0] is not uniquely determined.
  bool ambiguous = false;
};

/// Simulates the autonomous augmented system for `horizon` steps, stacks the
/// outputs of C̃ and solves for x̃[0] in the least-squares sense (minimum-norm
/// solution when ambiguous).
inline Reconstruction batch_reconstruct(const DenseMatrix& a_tilde, const DenseMatrix& c_tilde,
                                        const Vector& x0, std::size_t horizon,
                                        double rel_tol = 1e-10) {
  const Eigen::Index n = a_tilde.rows();
  if (a_tilde.cols() != n || c_tilde.cols() != n || x0.size() != n)
    throw std::invalid_argument("batch_reconstruct: dimension mismatch");
  if (horizon < static_cast<std::size_t>(n))
    throw std::invalid_argument("batch_reconstruct: horizon shorter than the state dimension");

  const Eigen::Index p = c_tilde.rows();
  const auto T = static_cast<Eigen::Index>(horizon);
  DenseMatrix obs(T * p, n);
  Vector y(T * p);
  DenseMatrix block = c_tilde;
  Vector x = x0;
  for (Eigen::Index k = 0; k < T; ++k) {
    obs.middleRows(k * p, p) = block;
    y.segment(k * p, p) = c_tilde * x;
    block = block * a_tilde;
    x = a_tilde * x;
  }

  Reconstruction out;
  if (n == 0) return out;
  Eigen::JacobiSVD<DenseMatrix> svd(obs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rel_tol);
  out.rank = static_cast<std::size_t>(svd.rank());
  out.ambiguous = out.rank < static_cast<std::size_t>(n);
  out.estimate = svd.solve(y);
  const double x0_norm = x0.norm();
  const double err = (out.estimate - x0).norm();
  out.relative_error = x0_norm > 0.0 ? err / x0_norm : err;
  out.residual = (obs * out.estimate - y).norm();
  return out;
}

struct SensorNumericSummary {
  std::size_t sensor = 0;
  std::size_t observable_trials = 0;
  std::size_t ambiguous_trials = 0;
  /// Smallest PBH margin seen over all trials.
  double min_margin = 1.0;
  /// Largest reconstruction error over the trials where the PBH test passed.
  double max_reconstruction_error = 0.0;
};

struct NumericVerification {
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t horizon = 0;
  double tolerance = 0.0;
  std::vector<SensorNumericSummary> per_sensor;
  /// W(G) drawn in the first trial.
  DenseMatrix first_w;
  bool all_observable = false;
};

/// Random unit vector for trial `t`, independent of the W(G) draw stream.
inline Vector trial_initial_state(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
  Vector x(static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = detail::uniform_open(gen, -1.0, 1.0);
  double nrm = x.norm();
  if (nrm > 0.0) x /= nrm;
  return x;
}

/// Draws W(G) `trials` times (seeds seed, seed+1, ...) and runs the PBH test
/// and batch reconstruction (horizon n+m) for every sensor. Missing numeric
/// A/C values default to the 0/1 patterns.
inline NumericVerification verify_numeric(const SystemSpec& input, std::uint64_t seed,
                                          std::size_t trials = 1, double tol = 1e-8) {
  if (trials == 0) throw std::invalid_argument("verify_numeric: at least one trial required");
  const SystemSpec s = with_default_values(input);
  const std::size_t n = s.n(), m = s.m();
  NumericVerification out;
  out.seed = seed;
  out.trials = trials;
  out.horizon = n + m;
  out.tolerance = tol;
  for (std::size_t i = 0; i < m; ++i) out.per_sensor.push_back({i, 0, 0, 1.0, 0.0});
  const SparsityPattern w_pattern = comm_pattern(s.comm);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = seed + t;
    DenseMatrix w = parametrize_w(w_pattern, *s.a_values, trial_seed);
    if (t == 0) out.first_w = w;
    DenseMatrix a_tilde = assemble_augmented(*s.a_values, *s.c_values, w);
    Vector x0 = trial_initial_state(n + m, trial_seed);
    for (std::size_t i = 0; i < m; ++i) {
      DenseMatrix c_tilde = sensor_output_matrix(s, i);
      PbhReport pbh = pbh_check(a_tilde, c_tilde, tol);
      SensorNumericSummary& sum = out.per_sensor[i];
      sum.min_margin = std::min(sum.min_margin, pbh.margin());
      Reconstruction rec = batch_reconstruct(a_tilde, c_tilde, x0, out.horizon);
      if (rec.ambiguous) ++sum.ambiguous_trials;
      if (pbh.observable) {
        ++sum.observable_trials;
        sum.max_reconstruction_error = std::max(sum.max_reconstruction_error, rec.relative_error);
      }
    }
  }
  out.all_observable = std::all_of(out.per_sensor.begin(), out.per_sensor.end(),
                                   [&](const SensorNumericSummary& p) {
                                     return p.observable_trials == trials;
                                   });
  return out;
}

}  // namespace netobs
