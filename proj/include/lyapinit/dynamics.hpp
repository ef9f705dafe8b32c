#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "lyapinit/analytic.hpp"
#include "lyapinit/ensembles.hpp"
#include "lyapinit/slopes.hpp"
#include "lyapinit/stats.hpp"

namespace lyapinit {

/// One network realization in (direction, log-norm) coordinates.
struct Trajectory {
  int depth = 0;
  std::vector<double> increments;  // Z_k = log|phi(W_k S_{k-1})|
  Vector final_direction;
  double log_norm = 0.0;        // log|x0| + sum of increments; -inf after absorption
  std::optional<int> hit_zero_at;  // 1-based layer at which phi(W S) vanished (ReLU only)
};

/// Seed and scheduling for Monte-Carlo runs. Trial k draws from
/// RngStream(seed, k), so results do not depend on `workers`.
struct RunConfig {
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0 = default_workers()
  bool keep_per_trial = false;
};

struct CLTReport {
  int depth = 0;
  std::size_t trials = 0;
  double lambda = 0.0;
  std::vector<double> normalized_samples;  // (log|X_l| - l lambda) / sqrt(l)
  double mean = 0.0;
  double gamma_hat = 0.0;  // empirical variance of the normalized samples
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

struct MomentReport {
  int steps = 0;
  std::size_t trials = 0;
  Vector mean;           // E[S]
  Matrix second_moment;  // E[S S^T]
  double max_abs_mean = 0.0;
  double max_second_moment_deviation = 0.0;  // || E[S S^T] - I/d ||_inf
};

struct ReluAbsorptionReport {
  int d = 0;
  int depth = 0;
  std::size_t trials = 0;
  double zero_fraction_layer1 = 0.0;
  double zero_fraction_final = 0.0;
  double std_error_layer1 = 0.0;
  double std_error_final = 0.0;
};

struct PositiveConeReport {
  MCEstimate limit_pos;  // (1/l) log|X_l| from +1/sqrt(d)
  MCEstimate limit_neg;  // from -1/sqrt(d)
  double gap = 0.0;
  double gap_std_error = 0.0;
  bool cone_preserved = true;  // every layer stayed strictly inside its starting cone
};

namespace dynamics {

/// Applies one layer to the unit vector `direction` in place and returns
/// log|phi(W direction)|. When the activation output is exactly zero the
/// direction is left untouched and -inf is returned.
template <typename DerivedW>
double propagate(const Eigen::MatrixBase<DerivedW>& w, const ActivationSlopes& slopes, Vector& direction,
                 Vector& scratch) {
  scratch.noalias() = w * direction;
  scratch = slopes.apply(scratch);
  const double norm = scratch.norm();
  if (!(norm > 0.0)) return -std::numeric_limits<double>::infinity();
  direction = scratch / norm;
  return std::log(norm);
}

/// X_l = phi(W_l X_{l-1}) tracked as unit direction plus accumulated log-norm.
/// ReLU slopes are accepted here and stop the run at the first zero vector.
Trajectory forward(const WeightStack& weights, const Vector& x0, const ActivationSlopes& slopes);

/// Average of log|phi(W e1)| over fresh draws of W.
MCEstimate estimate_lambda_single_step(const EnsembleSpec& ensemble, const ActivationSlopes& slopes,
                                       std::size_t trials, const RunConfig& config);

/// Average of (log|X_l| - log|x0|) / l over fresh depth-l stacks and
/// uniform-sphere inputs.
MCEstimate estimate_lambda_deep(const EnsembleSpec& ensemble, const ActivationSlopes& slopes, int depth,
                                std::size_t trials, const RunConfig& config);

/// Log-norms log|X_l| for unit uniform inputs, one per trial.
std::vector<double> sample_log_norms(const EnsembleSpec& ensemble, const ActivationSlopes& slopes, int depth,
                                     std::size_t trials, const RunConfig& config);

CLTReport estimate_clt(const EnsembleSpec& ensemble, const ActivationSlopes& slopes, int depth,
                       std::size_t trials, double lambda, const RunConfig& config);

/// CLT statistics from precomputed log-norms. Throws UsageError when the
/// normalized samples have numerically zero variance (a deterministic stack).
CLTReport clt_report_from_log_norms(const std::vector<double>& log_norms, int depth, double lambda);

/// Empirical E[S] and E[S S^T] after `steps` chain steps from uniform inputs.
MomentReport stationarity_check(const EnsembleSpec& ensemble, const ActivationSlopes& slopes, int steps,
                                std::size_t trials, const RunConfig& config);

/// ReLU dynamics with N(0, sigma^2) weights from e1.
ReluAbsorptionReport counterexample_relu(int d, double sigma, int depth, std::size_t trials,
                                         const RunConfig& config);

/// Slopes (1, alpha) with Unif[0, a] weights from +-1/sqrt(d), each sign on
/// its own independent streams.
PositiveConeReport counterexample_positive_cone(int d, double a, double alpha, int depth, std::size_t trials,
                                                const RunConfig& config);

/// Monte-Carlo E[exp(t phi(Z)^2)] for scalar Z ~ N(0, 1).
MCEstimate mgf_monte_carlo(double t, const ActivationSlopes& slopes, std::size_t samples,
                           const RunConfig& config);

}  // namespace dynamics
}  // namespace lyapinit
