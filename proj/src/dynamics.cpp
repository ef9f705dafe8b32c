#include "lyapinit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lyapinit/errors.hpp"

namespace lyapinit::dynamics {

namespace {

void require_trials(std::size_t trials, std::size_t minimum, const char* what) {
  if (trials < minimum) {
    throw UsageError(std::string(what) + " needs at least " + std::to_string(minimum) + " trials");
  }
}

// Normalized-sample variance at or below this counts as a deterministic stack.
constexpr double kDegenerateVariance = 1e-24;

void require_depth(int depth) {
  if (depth < 1) throw UsageError("depth must be >= 1");
}

// Runs `depth` fresh layers from `direction`, returning the summed log-norm increments.
double run_chain(const EnsembleSpec& ensemble, const ActivationSlopes& slopes, int depth, Vector& direction,
                 RngStream& rng) {
  Matrix w(ensemble.d, ensemble.d);
  Vector scratch(ensemble.d);
  double total = 0.0;
  for (int k = 0; k < depth; ++k) {
    ensembles::sample_into(ensemble, rng, w);
    total += propagate(w, slopes, direction, scratch);
  }
  return total;
}

}  // namespace

Trajectory forward(const WeightStack& weights, const Vector& x0, const ActivationSlopes& slopes) {
  weights.validate();
  if (x0.size() != weights.d) {
    throw UsageError("input has dimension " + std::to_string(x0.size()) + ", weights expect " +
                     std::to_string(weights.d));
  }
  const double x0_norm = x0.norm();
  if (!(x0_norm > 0.0) || !std::isfinite(x0_norm)) throw UsageError("input vector must be nonzero and finite");

  Trajectory traj;
  traj.depth = weights.depth();
  traj.increments.reserve(weights.matrices.size());
  traj.log_norm = std::log(x0_norm);
  Vector direction = x0 / x0_norm;
  Vector scratch(weights.d);
  for (int k = 0; k < weights.depth(); ++k) {
    const double z = propagate(weights.matrices[k], slopes, direction, scratch);
    traj.increments.push_back(z);
    traj.log_norm += z;
    if (std::isinf(z)) {
      traj.hit_zero_at = k + 1;
      break;
    }
  }
  traj.final_direction = std::move(direction);
  return traj;
}

MCEstimate estimate_lambda_single_step(const EnsembleSpec& ensemble, const ActivationSlopes& slopes,
                                       std::size_t trials, const RunConfig& config) {
  ensemble.validate();
  require_leaky(slopes);
  require_trials(trials, 100, "single-step estimate");
  std::vector<double> values(trials);
  parallel_for(trials, config.workers, [&](std::size_t k) {
    RngStream rng(config.seed, k);
    Vector direction = Vector::Unit(ensemble.d, 0);
    values[k] = run_chain(ensemble, slopes, 1, direction, rng);
  });
  return make_estimate(std::move(values), config.keep_per_trial);
}

std::vector<double> sample_log_norms(const EnsembleSpec& ensemble, const ActivationSlopes& slopes, int depth,
                                     std::size_t trials, const RunConfig& config) {
  ensemble.validate();
  require_leaky(slopes);
  require_depth(depth);
  std::vector<double> log_norms(trials);
  parallel_for(trials, config.workers, [&](std::size_t k) {
    RngStream rng(config.seed, k);
    Vector direction = ensembles::sample_unit_sphere(ensemble.d, rng);
    log_norms[k] = run_chain(ensemble, slopes, depth, direction, rng);
  });
  return log_norms;
}

MCEstimate estimate_lambda_deep(const EnsembleSpec& ensemble, const ActivationSlopes& slopes, int depth,
                                std::size_t trials, const RunConfig& config) {
  require_trials(trials, 2, "deep estimate");
  auto values = sample_log_norms(ensemble, slopes, depth, trials, config);
  for (double& v : values) v /= depth;
  return make_estimate(std::move(values), config.keep_per_trial);
}

CLTReport clt_report_from_log_norms(const std::vector<double>& log_norms, int depth, double lambda) {
  require_depth(depth);
  require_trials(log_norms.size(), 2, "CLT report");
  CLTReport r;
  r.depth = depth;
  r.trials = log_norms.size();
  r.lambda = lambda;
  const double root = std::sqrt(static_cast<double>(depth));
  r.normalized_samples.reserve(log_norms.size());
  for (double v : log_norms) r.normalized_samples.push_back((v - depth * lambda) / root);
  const auto m = sample_moments(r.normalized_samples);
  if (!(m.variance > kDegenerateVariance)) {
    throw UsageError("CLT statistic has zero variance; the weight distribution is deterministic");
  }
  r.mean = m.mean;
  r.gamma_hat = m.variance;
  r.skewness = m.skewness;
  r.excess_kurtosis = m.excess_kurtosis;
  return r;
}

CLTReport estimate_clt(const EnsembleSpec& ensemble, const ActivationSlopes& slopes, int depth,
                       std::size_t trials, double lambda, const RunConfig& config) {
  require_trials(trials, 1000, "CLT estimate");
  return clt_report_from_log_norms(sample_log_norms(ensemble, slopes, depth, trials, config), depth, lambda);
}

MomentReport stationarity_check(const EnsembleSpec& ensemble, const ActivationSlopes& slopes, int steps,
                                std::size_t trials, const RunConfig& config) {
  ensemble.validate();
  require_leaky(slopes);
  require_depth(steps);
  require_trials(trials, 2, "stationarity check");
  const int d = ensemble.d;
  std::vector<Vector> finals(trials);
  parallel_for(trials, config.workers, [&](std::size_t k) {
    RngStream rng(config.seed, k);
    Vector direction = ensembles::sample_unit_sphere(d, rng);
    run_chain(ensemble, slopes, steps, direction, rng);
    finals[k] = std::move(direction);
  });

  MomentReport r;
  r.steps = steps;
  r.trials = trials;
  r.mean = Vector::Zero(d);
  r.second_moment = Matrix::Zero(d, d);
  for (const Vector& s : finals) {
    r.mean += s;
    r.second_moment.noalias() += s * s.transpose();
  }
  r.mean /= static_cast<double>(trials);
  r.second_moment /= static_cast<double>(trials);
  r.max_abs_mean = r.mean.cwiseAbs().maxCoeff();
  r.max_second_moment_deviation = (r.second_moment - Matrix::Identity(d, d) / d).cwiseAbs().maxCoeff();
  return r;
}

ReluAbsorptionReport counterexample_relu(int d, double sigma, int depth, std::size_t trials,
                                         const RunConfig& config) {
  const auto ensemble = EnsembleSpec::gaussian(d, sigma);
  require_depth(depth);
  require_trials(trials, 2, "ReLU counterexample");
  const auto relu = ActivationSlopes::relu();
  std::vector<int> absorbed_at(trials, 0);  // 0 = never absorbed
  parallel_for(trials, config.workers, [&](std::size_t k) {
    RngStream rng(config.seed, k);
    Matrix w(d, d);
    Vector direction = Vector::Unit(d, 0);
    Vector scratch(d);
    for (int layer = 1; layer <= depth; ++layer) {
      ensembles::sample_into(ensemble, rng, w);
      if (std::isinf(propagate(w, relu, direction, scratch))) {
        absorbed_at[k] = layer;
        break;
      }
    }
  });

  std::size_t first = 0, final = 0;
  for (int at : absorbed_at) {
    if (at == 1) ++first;
    if (at >= 1) ++final;
  }
  const double n = static_cast<double>(trials);
  ReluAbsorptionReport r;
  r.d = d;
  r.depth = depth;
  r.trials = trials;
  r.zero_fraction_layer1 = first / n;
  r.zero_fraction_final = final / n;
  r.std_error_layer1 = std::sqrt(r.zero_fraction_layer1 * (1.0 - r.zero_fraction_layer1) / n);
  r.std_error_final = std::sqrt(r.zero_fraction_final * (1.0 - r.zero_fraction_final) / n);
  return r;
}

PositiveConeReport counterexample_positive_cone(int d, double a, double alpha, int depth, std::size_t trials,
                                                const RunConfig& config) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("positive-cone counterexample needs 0 < alpha < 1");
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("uniform weight bound a must be positive");
  if (d < 1) throw DomainError("width must be >= 1");
  require_depth(depth);
  require_trials(trials, 2, "positive-cone counterexample");
  const auto slopes = ActivationSlopes::leaky(alpha);

  std::vector<double> pos(trials), neg(trials);
  std::vector<char> preserved(2 * trials, 1);
  parallel_for(2 * trials, config.workers, [&](std::size_t job) {
    const double sign = job % 2 == 0 ? 1.0 : -1.0;
    RngStream rng(config.seed, job);
    Matrix w(d, d);
    Vector direction = Vector::Constant(d, sign / std::sqrt(static_cast<double>(d)));
    Vector scratch(d);
    double total = 0.0;
    for (int k = 0; k < depth; ++k) {
      w = ensembles::sample_uniform_positive_matrix(d, a, rng);
      total += propagate(w, slopes, direction, scratch);
      if (!((sign * direction.array()) > 0.0).all()) preserved[job] = 0;
    }
    (job % 2 == 0 ? pos : neg)[job / 2] = total / depth;
  });

  PositiveConeReport r;
  r.limit_pos = make_estimate(std::move(pos), config.keep_per_trial);
  r.limit_neg = make_estimate(std::move(neg), config.keep_per_trial);
  r.gap = r.limit_pos.mean - r.limit_neg.mean;
  r.gap_std_error = std::hypot(r.limit_pos.std_error, r.limit_neg.std_error);
  r.cone_preserved = std::all_of(preserved.begin(), preserved.end(), [](char c) { return c != 0; });
  return r;
}

MCEstimate mgf_monte_carlo(double t, const ActivationSlopes& slopes, std::size_t samples,
                           const RunConfig& config) {
  require_leaky(slopes);
  require_trials(samples, 2, "MGF estimate");
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<double> values(samples);
  parallel_for(blocks, config.workers, [&](std::size_t b) {
    RngStream rng(config.seed, b);
    const std::size_t end = std::min(samples, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      const double phi = slopes.apply(rng.normal());
      values[i] = std::exp(t * phi * phi);
    }
  });
  return make_estimate(std::move(values), config.keep_per_trial);
}

}  // namespace lyapinit::dynamics
