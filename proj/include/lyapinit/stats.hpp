#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lyapinit {

/// Monte-Carlo mean with standard error = sample sd / sqrt(trials).
struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::vector<double> per_trial_values;  // empty unless requested
};

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n - 1)
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

/// Two-pass central moments, summed in index order. Needs at least two values.
SampleMoments sample_moments(std::span<const double> values);

MCEstimate make_estimate(std::vector<double> values, bool keep_values);

/// Worker count from the LYAPINIT_THREADS environment variable, falling back
/// to std::thread::hardware_concurrency().
unsigned default_workers();

/// Calls body(i) for i in [0, n) across `workers` threads (0 = default).
/// Indices are split into contiguous blocks; results must be written to
/// per-index slots so the output does not depend on the worker count.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

}  // namespace lyapinit
